//! Normalized Jacobi polynomials and the Gauss rules built from them.

use nalgebra::{DMatrix, SymmetricEigen};

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Squared norm of the zeroth unnormalized Jacobi polynomial on [-1, 1].
fn gamma0(alpha: u32, beta: u32) -> f64 {
    let (a, b) = (alpha as f64, beta as f64);
    2f64.powf(a + b + 1.0) / (a + b + 1.0) * factorial(alpha) * factorial(beta)
        / factorial(alpha + beta)
}

/// Orthonormal Jacobi polynomial `P_n^{(alpha, beta)}(x)` on [-1, 1].
pub fn jacobi_p(x: f64, alpha: u32, beta: u32, n: usize) -> f64 {
    let (a, b) = (alpha as f64, beta as f64);
    let g0 = gamma0(alpha, beta);
    let p0 = 1.0 / g0.sqrt();
    if n == 0 {
        return p0;
    }
    let g1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * g0;
    let p1 = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / g1.sqrt();
    if n == 1 {
        return p1;
    }

    let mut a_old = 2.0 / (2.0 + a + b) * ((a + 1.0) * (b + 1.0) / (a + b + 3.0)).sqrt();
    let (mut prev, mut cur) = (p0, p1);
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + a + b;
        let a_new = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + a + b) * (i + 1.0 + a) * (i + 1.0 + b)
                / (h1 + 1.0)
                / (h1 + 3.0))
                .sqrt();
        let b_new = -(a * a - b * b) / h1 / (h1 + 2.0);
        let next = (-a_old * prev + (x - b_new) * cur) / a_new;
        prev = cur;
        cur = next;
        a_old = a_new;
    }
    cur
}

/// Derivative of [`jacobi_p`] with respect to `x`.
pub fn grad_jacobi_p(x: f64, alpha: u32, beta: u32, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * (nf + alpha as f64 + beta as f64 + 1.0)).sqrt() * jacobi_p(x, alpha + 1, beta + 1, n - 1)
}

/// Gauss-Jacobi quadrature with `n + 1` points (Golub-Welsch), nodes ascending.
pub fn jacobi_gq(alpha: u32, beta: u32, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (alpha as f64, beta as f64);
    if n == 0 {
        return (vec![-(a - b) / (a + b + 2.0)], vec![2.0]);
    }
    let m = n + 1;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let h1 = 2.0 * i as f64 + a + b;
        jac[(i, i)] = if a + b < 10.0 * f64::EPSILON {
            0.0
        } else {
            -0.5 * (a * a - b * b) / (h1 + 2.0) / h1
        };
        if i + 1 < m {
            let k = (i + 1) as f64;
            let off = 2.0 / (h1 + 2.0)
                * (k * (k + a + b) * (k + a) * (k + b) / (h1 + 1.0) / (h1 + 3.0)).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let g0 = gamma0(alpha, beta);
    let x = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let w = order
        .iter()
        .map(|&i| eig.eigenvectors[(0, i)].powi(2) * g0)
        .collect();
    (x, w)
}

/// Gauss-Lobatto-Jacobi points (`n + 1` of them, endpoints included).
pub fn jacobi_gl(alpha: u32, beta: u32, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![-1.0, 1.0];
    }
    let (interior, _) = jacobi_gq(alpha + 1, beta + 1, n - 2);
    let mut x = Vec::with_capacity(n + 1);
    x.push(-1.0);
    x.extend(interior);
    x.push(1.0);
    x
}

/// 1D Vandermonde of orthonormal Legendre polynomials up to degree `n`.
pub fn vandermonde_1d(n: usize, points: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), n + 1, |i, j| jacobi_p(points[i], 0, 0, j))
}
