//! Warp-and-blend interpolation nodes on the triangle.

use std::f64::consts::PI;

use super::jacobi::jacobi_gl;

/// Blend exponents optimizing the Lebesgue constant, indexed by degree - 1.
const ALPHA_OPT: [f64; 15] = [
    0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959,
    1.5743, 1.5770, 1.6223, 1.6258,
];

/// Edge displacement taking equispaced points to Gauss-Lobatto points,
/// divided by the edge blend `1 - r^2`.
fn warp_factor(n: usize, gl: &[f64], r: f64) -> f64 {
    let eq = |i: usize| -1.0 + 2.0 * i as f64 / n as f64;
    let mut warp = 0.0;
    for i in 0..=n {
        let mut lagrange = 1.0;
        for j in 0..=n {
            if j != i {
                lagrange *= (r - eq(j)) / (eq(i) - eq(j));
            }
        }
        warp += lagrange * (gl[i] - eq(i));
    }
    if r.abs() < 1.0 - 1e-10 {
        warp / (1.0 - r * r)
    } else {
        0.0
    }
}

/// Map from the equilateral triangle used during construction to `(r, s)`.
fn equilateral_to_rs(x: f64, y: f64) -> [f64; 2] {
    let sqrt3 = 3f64.sqrt();
    let l1 = (sqrt3 * y + 1.0) / 3.0;
    let l2 = (-3.0 * x - sqrt3 * y + 2.0) / 6.0;
    let l3 = (3.0 * x - sqrt3 * y + 2.0) / 6.0;
    [-l2 + l3 - l1, -l2 - l3 + l1]
}

/// Warp-and-blend nodes of degree `n` on the bi-unit triangle.
///
/// Nodes are ordered row by row from `s = -1` upwards, each row by increasing
/// `r`, so the vertices appear at indices `0`, `n` and `Np - 1`.
pub fn warp_blend_nodes(n: usize) -> Vec<[f64; 2]> {
    assert!(n >= 1, "degree must be at least 1");
    let alpha = ALPHA_OPT.get(n - 1).copied().unwrap_or(5.0 / 3.0);
    let gl = jacobi_gl(0, 0, n);
    let sqrt3 = 3f64.sqrt();
    let nf = n as f64;

    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for row in 0..=n {
        for col in 0..=n - row {
            let l1 = row as f64 / nf;
            let l3 = col as f64 / nf;
            let l2 = 1.0 - l1 - l3;
            let mut x = -l2 + l3;
            let mut y = (-l2 - l3 + 2.0 * l1) / sqrt3;

            let blend1 = 4.0 * l2 * l3;
            let blend2 = 4.0 * l1 * l3;
            let blend3 = 4.0 * l1 * l2;
            let warp1 = blend1 * warp_factor(n, &gl, l3 - l2) * (1.0 + (alpha * l1).powi(2));
            let warp2 = blend2 * warp_factor(n, &gl, l1 - l3) * (1.0 + (alpha * l2).powi(2));
            let warp3 = blend3 * warp_factor(n, &gl, l2 - l1) * (1.0 + (alpha * l3).powi(2));

            x += warp1 + (2.0 * PI / 3.0).cos() * warp2 + (4.0 * PI / 3.0).cos() * warp3;
            y += (2.0 * PI / 3.0).sin() * warp2 + (4.0 * PI / 3.0).sin() * warp3;
            out.push(equilateral_to_rs(x, y));
        }
    }
    out
}

/// Storage index of lattice point `(row, col)` in [`warp_blend_nodes`] order.
pub fn lattice_index(n: usize, row: usize, col: usize) -> usize {
    debug_assert!(row + col <= n);
    row * (n + 1) - row * (row.saturating_sub(1)) / 2 + col
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_index_is_sequential() {
        let n = 5;
        let mut expect = 0;
        for row in 0..=n {
            for col in 0..=n - row {
                assert_eq!(lattice_index(n, row, col), expect);
                expect += 1;
            }
        }
    }
}
