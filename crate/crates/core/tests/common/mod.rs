#![allow(dead_code)]

use dgtd::mesh::{Mesh, Rect};
use proptest::prelude::*;

/// Structured mesh with interior vertices perturbed by up to `jitter` of a
/// cell, element order permuted and local vertex order rotated.
pub fn perturbed_mesh(nx: usize, ny: usize, jitter: &[f64], perm_seed: u64) -> Mesh {
    let base = Mesh::rectangle(nx, ny, Rect::unit()).unwrap();
    let (hx, hy) = (1.0 / nx as f64, 1.0 / ny as f64);
    let mut vertices = base.vertices.clone();
    for (i, v) in vertices.iter_mut().enumerate() {
        let interior = v[0] > 1e-12 && v[0] < 1.0 - 1e-12 && v[1] > 1e-12 && v[1] < 1.0 - 1e-12;
        if interior {
            v[0] += hx * jitter[(2 * i) % jitter.len()];
            v[1] += hy * jitter[(2 * i + 1) % jitter.len()];
        }
    }
    let mut etov = base.etov.clone();
    let mut state = perm_seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for i in (1..etov.len()).rev() {
        let j = (next() % (i as u64 + 1)) as usize;
        etov.swap(i, j);
    }
    for t in etov.iter_mut() {
        t.rotate_left((next() % 3) as usize);
    }
    Mesh::new(vertices, etov).unwrap()
}

pub fn mesh_strategy() -> impl Strategy<Value = Mesh> {
    (1usize..5, 1usize..5, prop::collection::vec(-0.2f64..0.2, 8), any::<u64>())
        .prop_map(|(nx, ny, jitter, seed)| perturbed_mesh(nx, ny, &jitter, seed))
}

/// Single element, two-triangle square, and a 2 x 2 rectangle: K = 1, 2, 8.
pub fn small_meshes() -> Vec<Mesh> {
    vec![
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]], vec![[0, 1, 2]]).unwrap(),
        Mesh::rectangle(1, 1, Rect::unit()).unwrap(),
        perturbed_mesh(2, 2, &[0.13, -0.07, 0.05], 7),
    ]
}

/// Gauss-Legendre rule by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
    }
    (x, w)
}

/// Tensor Gauss rule pulled back to the triangle through the Duffy map.
pub fn triangle_rule(n: usize) -> Vec<([f64; 2], f64)> {
    let (x, w) = gauss_legendre(n);
    let mut out = Vec::new();
    for (u, wu) in x.iter().zip(&w) {
        for (v, wv) in x.iter().zip(&w) {
            let r = 0.5 * (1.0 + u) * (1.0 - v) - 1.0;
            out.push(([r, *v], wu * wv * 0.5 * (1.0 - v)));
        }
    }
    out
}
