//! Binary PPM (P6, maxval 255).

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::{ColorImage, ColorSpace};
use crate::error::{Error, Result};

/// Splits the header into its four tokens and returns the payload offset.
fn header_tokens(bytes: &[u8]) -> Option<([String; 4], usize)> {
    let mut tokens: Vec<String> = Vec::with_capacity(4);
    let mut pos = 0;
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // exactly one whitespace byte separates maxval from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return None;
    }
    let tokens: [String; 4] = tokens.try_into().ok()?;
    Some((tokens, pos + 1))
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ColorImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if !bytes.starts_with(b"P6") {
        return Err(Error::format(path, "not a binary PPM (expected magic P6)"));
    }
    let ([magic, w, h, maxval], offset) =
        header_tokens(&bytes).ok_or_else(|| Error::format(path, "truncated PPM header"))?;
    if magic != "P6" {
        return Err(Error::format(path, "not a binary PPM (expected magic P6)"));
    }
    let parse = |s: &str, what: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|v| *v > 0)
            .ok_or_else(|| Error::format(path, format!("invalid PPM {what} `{s}`")))
    };
    let width = parse(&w, "width")?;
    let height = parse(&h, "height")?;
    if maxval != "255" {
        return Err(Error::format(path, format!("unsupported maxval {maxval} (only 255)")));
    }
    let m = width * height;
    let payload = &bytes[offset..];
    if payload.len() < 3 * m {
        return Err(Error::format(
            path,
            format!("truncated payload: {} bytes, expected {}", payload.len(), 3 * m),
        ));
    }
    let data = DMatrix::from_iterator(3, m, payload[..3 * m].iter().map(|&b| f64::from(b) / 255.0));
    ColorImage::new(ColorSpace::Rgb, height, width, data)
}

pub fn write_image(image: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image.expect_space(ColorSpace::Rgb)?;
    let mut bytes = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    bytes.extend(image.data().iter().map(|&x| (x.clamp(0.0, 1.0) * 255.0).round() as u8));
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
