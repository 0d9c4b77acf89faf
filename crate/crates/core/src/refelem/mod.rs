//! Reference-triangle operators for the nodal discretization.
//!
//! The reference element is the bi-unit triangle with vertices `(-1,-1)`,
//! `(1,-1)`, `(-1,1)`. Faces are numbered 0 (bottom, `s = -1`), 1 (hypotenuse,
//! `r + s = 0`) and 2 (left, `r = -1`); every face lists its nodes in
//! counterclockwise order.

mod basis;
mod jacobi;
mod nodes;

pub use basis::{eval_orthonormal_basis, grad_simplex_p, modes, rs_to_ab, simplex_p};
pub use jacobi::{grad_jacobi_p, jacobi_gl, jacobi_gq, jacobi_p, vandermonde_1d};
pub use nodes::{lattice_index, warp_blend_nodes};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Highest supported polynomial degree. The Vandermonde conditioning degrades beyond it.
pub const MAX_DEGREE: usize = 15;

/// Node tolerance used when classifying nodes onto faces.
const FACE_TOL: f64 = 1e-10;

/// Number of volume nodes for degree `n`.
pub const fn volume_nodes(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// All element-local operators for a fixed polynomial degree.
#[derive(Clone, Debug)]
pub struct ReferenceElement {
    /// Polynomial degree `N`.
    pub degree: usize,
    /// Volume nodes, `(N+1)(N+2)/2`.
    pub np: usize,
    /// Nodes per face, `N+1`.
    pub nfp: usize,
    /// Interpolation nodes `(r, s)`.
    pub nodes: Vec<[f64; 2]>,
    /// `V[i][j] = phi_j(r_i, s_i)`.
    pub v: DMatrix<f64>,
    pub v_inv: DMatrix<f64>,
    /// Nodal differentiation along `r`.
    pub dr: DMatrix<f64>,
    /// Nodal differentiation along `s`.
    pub ds: DMatrix<f64>,
    /// Reference mass matrix `(V V^T)^{-1}`.
    pub mass: DMatrix<f64>,
    /// Volume node indices on each face, counterclockwise.
    pub face_mask: [Vec<usize>; 3],
    /// `M^{-1} M^{dI}`, shape `Np x 3 Nfp`, columns grouped face by face.
    pub lift: DMatrix<f64>,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let np = volume_nodes(degree);
        let nfp = degree + 1;
        let nodes = warp_blend_nodes(degree);

        let collapsed: Vec<(f64, f64)> = nodes.iter().map(|&[r, s]| rs_to_ab(r, s)).collect();
        let mut v = DMatrix::zeros(np, np);
        let mut vr = DMatrix::zeros(np, np);
        let mut vs = DMatrix::zeros(np, np);
        for (col, (i, j)) in modes(degree).enumerate() {
            for (row, &(a, b)) in collapsed.iter().enumerate() {
                v[(row, col)] = simplex_p(a, b, i, j);
                let (dr, ds) = grad_simplex_p(a, b, i, j);
                vr[(row, col)] = dr;
                vs[(row, col)] = ds;
            }
        }
        let v_inv = v
            .clone()
            .try_inverse()
            .expect("warp-and-blend Vandermonde is invertible for supported degrees");
        let dr = &vr * &v_inv;
        let ds = &vs * &v_inv;
        let mass = &v_inv.transpose() * &v_inv;

        let face_mask = face_masks(&nodes);

        let mut emat = DMatrix::zeros(np, 3 * nfp);
        for (face, mask) in face_mask.iter().enumerate() {
            let t: Vec<f64> = mask
                .iter()
                .map(|&i| {
                    let [r, s] = nodes[i];
                    match face {
                        0 => r,
                        1 => s,
                        _ => -s,
                    }
                })
                .collect();
            let v1 = vandermonde_1d(degree, &t);
            let face_mass = (&v1 * v1.transpose())
                .try_inverse()
                .expect("1D Vandermonde is invertible");
            for (a, &row) in mask.iter().enumerate() {
                for b in 0..nfp {
                    emat[(row, face * nfp + b)] = face_mass[(a, b)];
                }
            }
        }
        let lift = &v * (v.transpose() * emat);

        Ok(Self {
            degree,
            np,
            nfp,
            nodes,
            v,
            v_inv,
            dr,
            ds,
            mass,
            face_mask,
            lift,
        })
    }

    /// Maps nodal values to values at arbitrary reference points.
    pub fn interpolation_matrix(&self, points: &[[f64; 2]]) -> DMatrix<f64> {
        let mut vq = DMatrix::zeros(points.len(), self.np);
        for (col, (i, j)) in modes(self.degree).enumerate() {
            for (row, &[r, s]) in points.iter().enumerate() {
                let (a, b) = rs_to_ab(r, s);
                vq[(row, col)] = simplex_p(a, b, i, j);
            }
        }
        vq * &self.v_inv
    }

    /// Sub-triangulation of the node lattice: `N^2` counterclockwise triangles.
    pub fn sub_triangles(&self) -> Vec<[usize; 3]> {
        let n = self.degree;
        let mut tris = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n - row {
                let a = lattice_index(n, row, col);
                let b = lattice_index(n, row, col + 1);
                let c = lattice_index(n, row + 1, col);
                tris.push([a, b, c]);
                if col + 1 < n - row {
                    let d = lattice_index(n, row + 1, col + 1);
                    tris.push([b, d, c]);
                }
            }
        }
        tris
    }
}

fn face_masks(nodes: &[[f64; 2]]) -> [Vec<usize>; 3] {
    let select = |pred: &dyn Fn(f64, f64) -> bool, key: &dyn Fn(f64, f64) -> f64| {
        let mut idx: Vec<usize> = (0..nodes.len())
            .filter(|&i| pred(nodes[i][0], nodes[i][1]))
            .collect();
        idx.sort_by(|&a, &b| {
            key(nodes[a][0], nodes[a][1]).total_cmp(&key(nodes[b][0], nodes[b][1]))
        });
        idx
    };
    [
        select(&|_, s| (s + 1.0).abs() < FACE_TOL, &|r, _| r),
        select(&|r, s| (r + s).abs() < FACE_TOL, &|_, s| s),
        select(&|r, _| (r + 1.0).abs() < FACE_TOL, &|_, s| -s),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_shapes() {
        let re = ReferenceElement::new(1).unwrap();
        assert_eq!((re.np, re.nfp), (3, 2));
        assert_eq!(re.lift.shape(), (3, 6));
        assert_eq!(re.face_mask, [vec![0, 1], vec![1, 2], vec![2, 0]]);
    }

    #[test]
    fn degree_range() {
        assert!(matches!(
            ReferenceElement::new(0),
            Err(Error::UnsupportedDegree(0))
        ));
        assert!(ReferenceElement::new(MAX_DEGREE + 1).is_err());
        assert!(ReferenceElement::new(MAX_DEGREE).is_ok());
    }

    #[test]
    fn dr_of_r_is_one() {
        let re = ReferenceElement::new(3).unwrap();
        let r = DMatrix::from_iterator(re.np, 1, re.nodes.iter().map(|p| p[0]));
        let d = &re.dr * r;
        assert!(d.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn r2s_derivative_degree_four() {
        let re = ReferenceElement::new(4).unwrap();
        let u = DMatrix::from_iterator(re.np, 1, re.nodes.iter().map(|&[r, s]| r * r * s));
        let d = &re.dr * u;
        let err = re
            .nodes
            .iter()
            .zip(d.iter())
            .map(|(&[r, s], &d)| (d - 2.0 * r * s).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn face_nodes_lie_on_faces() {
        for n in 1..=10 {
            let re = ReferenceElement::new(n).unwrap();
            for (f, mask) in re.face_mask.iter().enumerate() {
                assert_eq!(mask.len(), re.nfp);
                for &i in mask {
                    let [r, s] = re.nodes[i];
                    let g = match f {
                        0 => s + 1.0,
                        1 => r + s,
                        _ => r + 1.0,
                    };
                    assert!(g.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sub_triangle_count() {
        for n in 1..=6 {
            let re = ReferenceElement::new(n).unwrap();
            assert_eq!(re.sub_triangles().len(), n * n);
        }
    }
}
