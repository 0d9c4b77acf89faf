use super::Mesh;
use crate::error::{Error, Result};
use crate::refelem::ReferenceElement;

/// Per-element affine map data and per-face normals.
///
/// The map from the reference triangle is `x = A_k (r, s)^T + b_k`, so
/// `rx, ry, sx, sy` are the entries of `A_k^{-1}` and `det` is `|A_k|`
/// (element area divided by the reference area 2).
#[derive(Clone, Debug)]
pub struct GeomFactors {
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub det: Vec<f64>,
    /// Outward unit normals per face.
    pub nx: Vec<[f64; 3]>,
    pub ny: Vec<[f64; 3]>,
    /// Face Jacobian (half the physical face length) over `det`.
    pub fsc: Vec<[f64; 3]>,
    /// Physical coordinates of every volume node, element-major.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl GeomFactors {
    pub fn new(mesh: &Mesh, reference: &ReferenceElement) -> Result<Self> {
        let kk = mesh.num_elements();
        let np = reference.np;
        let mut g = Self {
            rx: Vec::with_capacity(kk),
            ry: Vec::with_capacity(kk),
            sx: Vec::with_capacity(kk),
            sy: Vec::with_capacity(kk),
            det: Vec::with_capacity(kk),
            nx: Vec::with_capacity(kk),
            ny: Vec::with_capacity(kk),
            fsc: Vec::with_capacity(kk),
            x: Vec::with_capacity(kk * np),
            y: Vec::with_capacity(kk * np),
        };

        for k in 0..kk {
            let [v1, v2, v3] = mesh.etov[k].map(|i| mesh.vertices[i]);
            let xr = 0.5 * (v2[0] - v1[0]);
            let xs = 0.5 * (v3[0] - v1[0]);
            let yr = 0.5 * (v2[1] - v1[1]);
            let ys = 0.5 * (v3[1] - v1[1]);
            let det = xr * ys - xs * yr;
            let scale = xr.abs().max(xs.abs()).max(yr.abs()).max(ys.abs());
            if !(det > 1e-14 * scale * scale) {
                return Err(Error::DegenerateElement(k));
            }
            g.rx.push(ys / det);
            g.ry.push(-xs / det);
            g.sx.push(-yr / det);
            g.sy.push(xr / det);
            g.det.push(det);

            // unnormalized outward normals have length equal to the face Jacobian
            let raw = [(yr, -xr), (ys - yr, xr - xs), (-ys, xs)];
            let mut nx = [0.0; 3];
            let mut ny = [0.0; 3];
            let mut fsc = [0.0; 3];
            for f in 0..3 {
                let sj = raw[f].0.hypot(raw[f].1);
                nx[f] = raw[f].0 / sj;
                ny[f] = raw[f].1 / sj;
                fsc[f] = sj / det;
            }
            g.nx.push(nx);
            g.ny.push(ny);
            g.fsc.push(fsc);

            for &[r, s] in &reference.nodes {
                g.x.push(v1[0] + xr * (r + 1.0) + xs * (s + 1.0));
                g.y.push(v1[1] + yr * (r + 1.0) + ys * (s + 1.0));
            }
        }
        Ok(g)
    }

    pub fn num_elements(&self) -> usize {
        self.det.len()
    }

    /// `A_k` reconstructed from the stored inverse, as `[[xr, xs], [yr, ys]]`.
    pub fn jacobian(&self, k: usize) -> [[f64; 2]; 2] {
        let inv_det = self.rx[k] * self.sy[k] - self.ry[k] * self.sx[k];
        [
            [self.sy[k] / inv_det, -self.ry[k] / inv_det],
            [-self.sx[k] / inv_det, self.rx[k] / inv_det],
        ]
    }

    /// Physical length of face `f` of element `k`.
    pub fn face_length(&self, k: usize, f: usize) -> f64 {
        2.0 * self.fsc[k][f] * self.det[k]
    }
}
