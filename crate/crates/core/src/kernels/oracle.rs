//! Naive reference RHS for testing: dense per-element products and explicit
//! face-by-face jump loops, with its own geometry and neighbor matching.
//! Unit material only.

use nalgebra::{DMatrix, DVector};

use crate::mesh::Mesh;
use crate::refelem::ReferenceElement;

struct ElementMap {
    origin: [f64; 2],
    jac: [[f64; 2]; 2],
}

impl ElementMap {
    fn new(mesh: &Mesh, k: usize) -> Self {
        let [a, b, c] = mesh.etov[k].map(|i| mesh.vertices[i]);
        Self {
            origin: a,
            jac: [
                [(b[0] - a[0]) / 2.0, (c[0] - a[0]) / 2.0],
                [(b[1] - a[1]) / 2.0, (c[1] - a[1]) / 2.0],
            ],
        }
    }

    fn point(&self, [r, s]: [f64; 2]) -> [f64; 2] {
        let j = &self.jac;
        [
            self.origin[0] + j[0][0] * (r + 1.0) + j[0][1] * (s + 1.0),
            self.origin[1] + j[1][0] * (r + 1.0) + j[1][1] * (s + 1.0),
        ]
    }

    fn det(&self) -> f64 {
        self.jac[0][0] * self.jac[1][1] - self.jac[0][1] * self.jac[1][0]
    }

    /// Rows of `A^{-1}`: `[[rx, ry], [sx, sy]]`.
    fn inverse(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        let j = &self.jac;
        [[j[1][1] / d, -j[0][1] / d], [-j[1][0] / d, j[0][0] / d]]
    }
}

/// Reference RHS on element-major vectors `[Hx, Hy, Ez]`, each `K * Np` long.
pub fn dense_oracle_rhs(
    q: [&[f64]; 3],
    mesh: &Mesh,
    reference: &ReferenceElement,
    alpha: f64,
) -> [Vec<f64>; 3] {
    oracle(q, mesh, reference, Some(alpha))
}

/// Volume term alone.
pub fn dense_oracle_volume(q: [&[f64]; 3], mesh: &Mesh, reference: &ReferenceElement) -> [Vec<f64>; 3] {
    oracle(q, mesh, reference, None)
}

fn oracle(
    q: [&[f64]; 3],
    mesh: &Mesh,
    reference: &ReferenceElement,
    alpha: Option<f64>,
) -> [Vec<f64>; 3] {
    let np = reference.np;
    let nfp = reference.nfp;
    let kk = mesh.num_elements();
    let maps: Vec<ElementMap> = (0..kk).map(|k| ElementMap::new(mesh, k)).collect();
    let local = |field: usize, k: usize| DVector::from_column_slice(&q[field][k * np..(k + 1) * np]);

    let mut out = [vec![0.0; kk * np], vec![0.0; kk * np], vec![0.0; kk * np]];
    for k in 0..kk {
        let [[rx, ry], [sx, sy]] = maps[k].inverse();
        let dx: DMatrix<f64> = &reference.dr * rx + &reference.ds * sx;
        let dy: DMatrix<f64> = &reference.dr * ry + &reference.ds * sy;
        let (hx, hy, ez) = (local(0, k), local(1, k), local(2, k));

        let mut rhs_hx = -(&dy * &ez);
        let mut rhs_hy = &dx * &ez;
        let mut rhs_ez = &dx * &hy - &dy * &hx;

        let Some(alpha) = alpha else {
            for (dst, src) in out.iter_mut().zip([rhs_hx, rhs_hy, rhs_ez]) {
                dst[k * np..(k + 1) * np].copy_from_slice(src.as_slice());
            }
            continue;
        };
        let mut flux = [
            DVector::zeros(3 * nfp),
            DVector::zeros(3 * nfp),
            DVector::zeros(3 * nfp),
        ];
        for f in 0..3 {
            let (a, b) = mesh.face_vertices(k, f);
            let edge = [b[0] - a[0], b[1] - a[1]];
            let len = edge[0].hypot(edge[1]);
            let (nx, ny) = (edge[1] / len, -edge[0] / len);
            let scale = (len / 2.0) / maps[k].det();
            let neighbor = mesh.etoe[k][f];
            let boundary = neighbor == k && mesh.etof[k][f] == f;

            for (p, &n) in reference.face_mask[f].iter().enumerate() {
                let x = maps[k].point(reference.nodes[n]);
                let (hx_m, hy_m, ez_m) = (hx[n], hy[n], ez[n]);
                let (hx_p, hy_p, ez_p) = if boundary {
                    (hx_m, hy_m, -ez_m)
                } else {
                    let n2 = (0..np)
                        .min_by(|&i, &j| {
                            let d = |i: usize| {
                                let y = maps[neighbor].point(reference.nodes[i]);
                                (y[0] - x[0]).hypot(y[1] - x[1])
                            };
                            d(i).total_cmp(&d(j))
                        })
                        .unwrap();
                    let g = neighbor * np + n2;
                    (q[0][g], q[1][g], q[2][g])
                };
                let (dhx, dhy, dez) = (hx_m - hx_p, hy_m - hy_p, ez_m - ez_p);
                let ndh = nx * dhx + ny * dhy;
                let i = f * nfp + p;
                flux[0][i] = scale * (ny * dez + alpha * (nx * ndh - dhx));
                flux[1][i] = scale * (-nx * dez + alpha * (ny * ndh - dhy));
                flux[2][i] = scale * (ny * dhx - nx * dhy - alpha * dez);
            }
        }
        rhs_hx += &reference.lift * &flux[0] * 0.5;
        rhs_hy += &reference.lift * &flux[1] * 0.5;
        rhs_ez += &reference.lift * &flux[2] * 0.5;

        for (dst, src) in out.iter_mut().zip([rhs_hx, rhs_hy, rhs_ez]) {
            dst[k * np..(k + 1) * np].copy_from_slice(src.as_slice());
        }
    }
    out
}
