//! Natural-color rendering of hyperspectral image cubes.
//!
//! A cube's pixels are linked by a spectral–spatial kNN graph; a sparse set of
//! pixel correspondences anchors output colors to a reference RGB image. Two
//! closed-form solvers are provided: [`solver::instance_level`] computes the
//! colors of every pixel directly, and [`solver::feature_level`] learns a
//! `bands × 3` linear projection that can be reused on other cubes from the
//! same sensor.
//!
//! All color-space arithmetic happens in the decorrelated Lαβ space
//! ([`hsi_io::rgb_to_lab`]); conversion back to RGB only happens at output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correspondence;
pub mod error;
pub mod graph;
pub mod hsi_io;
pub mod metrics;
pub mod solver;
pub mod synthetic;

pub use error::{Error, Result};
