//! Conjugate gradient for symmetric positive-definite operators.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `|b - A x| / |b|` of the returned `x`.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Solves `A x = b` from `x = 0`.
///
/// Converged means both `|r|_2 <= tol |b|_2` and `|r|_inf <= tol |b|_inf`,
/// checked on the true residual. `diagonal`, when given, enables Jacobi
/// preconditioning and must be the (positive) diagonal of `A`.
pub fn cg_solve<F>(
    apply_a: F,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    diagonal: Option<&[f64]>,
) -> Result<CgOutcome>
where
    F: Fn(&[f64], &mut [f64]),
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("cg tolerance must be positive, got {tol}")));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side".into()));
    }
    if let Some(d) = diagonal {
        if d.len() != b.len() || d.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidArgument("Jacobi diagonal must be positive and match b".into()));
        }
    }
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    let b_inf = norm_inf(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(CgOutcome { x, iterations: 0, residual: 0.0, converged: true });
    }
    let small_enough = |r: &[f64]| dot(r, r).sqrt() <= tol * b_norm && norm_inf(r) <= tol * b_inf;
    let precondition = |r: &[f64], z: &mut [f64]| match diagonal {
        Some(d) => z.iter_mut().zip(r).zip(d).for_each(|((z, r), d)| *z = r / d),
        None => z.copy_from_slice(r),
    };
    let true_residual = |x: &[f64], ax: &mut [f64], r: &mut [f64]| {
        apply_a(x, ax);
        r.iter_mut().zip(b).zip(ax.iter()).for_each(|((r, b), ax)| *r = b - ax);
    };

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut ap = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        apply_a(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !pap.is_finite() {
            return Err(Error::NonFinite(format!("operator output at iteration {iterations}")));
        }
        if pap <= 0.0 {
            return Err(Error::SolverBreakdown(format!(
                "p'Ap = {pap:e} at iteration {iterations}; operator is not positive definite"
            )));
        }
        let alpha = rz / pap;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, ap)| *r -= alpha * ap);
        iterations += 1;

        if small_enough(&r) {
            // the recurrence drifts from b - Ax; confirm before stopping
            true_residual(&x, &mut ap, &mut r);
            if small_enough(&r) {
                converged = true;
                break;
            }
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        if !rz_next.is_finite() {
            return Err(Error::NonFinite(format!("residual at iteration {iterations}")));
        }
        let beta = rz_next / rz;
        rz = rz_next;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }

    true_residual(&x, &mut ap, &mut r);
    let residual = dot(&r, &r).sqrt() / b_norm;
    if !residual.is_finite() {
        return Err(Error::NonFinite("final residual".into()));
    }
    Ok(CgOutcome { x, iterations, residual, converged })
}
