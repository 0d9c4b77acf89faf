//! Orthonormal Koornwinder-Dubiner basis on the bi-unit reference triangle.

use super::jacobi::{grad_jacobi_p, jacobi_p};
use super::MAX_DEGREE;
use crate::error::{Error, Result};

const INSIDE_TOL: f64 = 1e-12;

/// Collapsed coordinates `(a, b)` of a reference point; the top vertex maps to `a = -1`.
pub fn rs_to_ab(r: f64, s: f64) -> (f64, f64) {
    let a = if s != 1.0 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    (a, s)
}

/// Mode `(i, j)` at collapsed coordinates.
pub fn simplex_p(a: f64, b: f64, i: usize, j: usize) -> f64 {
    let h1 = jacobi_p(a, 0, 0, i);
    let h2 = jacobi_p(b, 2 * i as u32 + 1, 0, j);
    std::f64::consts::SQRT_2 * h1 * h2 * (1.0 - b).powi(i as i32)
}

/// Reference-coordinate gradient `(d/dr, d/ds)` of mode `(i, j)`.
pub fn grad_simplex_p(a: f64, b: f64, i: usize, j: usize) -> (f64, f64) {
    let fa = jacobi_p(a, 0, 0, i);
    let dfa = grad_jacobi_p(a, 0, 0, i);
    let gb = jacobi_p(b, 2 * i as u32 + 1, 0, j);
    let dgb = grad_jacobi_p(b, 2 * i as u32 + 1, 0, j);
    let half_1mb = 0.5 * (1.0 - b);

    let mut dr = dfa * gb;
    let mut ds = dfa * (gb * 0.5 * (1.0 + a));
    if i > 0 {
        let p = half_1mb.powi(i as i32 - 1);
        dr *= p;
        ds *= p;
    }
    let mut tmp = dgb * half_1mb.powi(i as i32);
    if i > 0 {
        tmp -= 0.5 * i as f64 * gb * half_1mb.powi(i as i32 - 1);
    }
    ds += fa * tmp;

    let scale = 2f64.powf(i as f64 + 0.5);
    (scale * dr, scale * ds)
}

/// Enumerates the `(i, j)` mode pairs of total degree at most `n`, in Vandermonde column order.
pub fn modes(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |i| (0..=n - i).map(move |j| (i, j)))
}

pub(crate) fn inside_reference(r: f64, s: f64) -> bool {
    r >= -1.0 - INSIDE_TOL && s >= -1.0 - INSIDE_TOL && r + s <= INSIDE_TOL
}

/// Value of the orthonormal mode `(i, j)` at reference point `(r, s)`.
///
/// The basis is orthonormal in `L2` over the reference triangle, which has
/// area 2, so the constant mode is `1/sqrt(2)`.
pub fn eval_orthonormal_basis(i: usize, j: usize, r: f64, s: f64) -> Result<f64> {
    let max = 2 * MAX_DEGREE;
    if i + j > max {
        return Err(Error::ModeOutOfRange { i, j, max });
    }
    if !inside_reference(r, s) {
        return Err(Error::PointOutsideReference { r, s });
    }
    let (a, b) = rs_to_ab(r, s);
    Ok(simplex_p(a, b, i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mode() {
        let v = eval_orthonormal_basis(0, 0, -0.2, -0.5).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn top_vertex_is_finite() {
        for (i, j) in modes(6) {
            let v = eval_orthonormal_basis(i, j, -1.0, 1.0).unwrap();
            assert!(v.is_finite());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            eval_orthonormal_basis(20, 20, 0.0, -1.0),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            eval_orthonormal_basis(1, 0, 0.5, 0.5),
            Err(Error::PointOutsideReference { .. })
        ));
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let (r, s) = (-0.3, -0.4);
        let h = 1e-6;
        for (i, j) in modes(5) {
            let f = |r: f64, s: f64| {
                let (a, b) = rs_to_ab(r, s);
                simplex_p(a, b, i, j)
            };
            let (a, b) = rs_to_ab(r, s);
            let (dr, ds) = grad_simplex_p(a, b, i, j);
            let fdr = (f(r + h, s) - f(r - h, s)) / (2.0 * h);
            let fds = (f(r, s + h) - f(r, s - h)) / (2.0 * h);
            assert!((dr - fdr).abs() < 1e-6, "mode ({i},{j}) dr");
            assert!((ds - fds).abs() < 1e-6, "mode ({i},{j}) ds");
        }
    }
}
