use super::{GeomFactors, Mesh};
use crate::error::{Error, Result};
use crate::refelem::ReferenceElement;

/// One face trace point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfRecord {
    /// Global volume-DOF index (`k * Np + n`) of the local trace point.
    pub id_m: usize,
    /// Global volume-DOF index of the neighbor's trace point; `id_m` on the boundary.
    pub id_p: usize,
    pub nx: f64,
    pub ny: f64,
    /// Face Jacobian over volume Jacobian.
    pub fsc: f64,
    /// `+1` on interior faces, `-1` on PEC boundary faces.
    pub bsc: f64,
}

/// Flat surface descriptor, ordered element-major, then face, then face point.
#[derive(Clone, Debug)]
pub struct SurfInfo {
    pub nfp: usize,
    pub records: Vec<SurfRecord>,
}

impl SurfInfo {
    pub fn new(mesh: &Mesh, geom: &GeomFactors, reference: &ReferenceElement) -> Result<Self> {
        let (np, nfp) = (reference.np, reference.nfp);
        let kk = mesh.num_elements();
        let mut records = Vec::with_capacity(kk * 3 * nfp);

        for k in 0..kk {
            for f in 0..3 {
                let boundary = mesh.is_boundary(k, f);
                let (k2, f2) = (mesh.etoe[k][f], mesh.etof[k][f]);
                let tol = 1e-8 * geom.face_length(k, f).max(1e-300);
                for &n in &reference.face_mask[f] {
                    let id_m = k * np + n;
                    let id_p = if boundary {
                        id_m
                    } else {
                        let (px, py) = (geom.x[id_m], geom.y[id_m]);
                        let (best, dist) = reference.face_mask[f2]
                            .iter()
                            .map(|&n2| {
                                let id = k2 * np + n2;
                                (id, (geom.x[id] - px).hypot(geom.y[id] - py))
                            })
                            .min_by(|a, b| a.1.total_cmp(&b.1))
                            .expect("faces have at least two nodes");
                        if dist > tol {
                            return Err(Error::NonConforming(format!(
                                "trace point {n} of element {k} face {f} has no match on element {k2} face {f2} (distance {dist:e})"
                            )));
                        }
                        best
                    };
                    records.push(SurfRecord {
                        id_m,
                        id_p,
                        nx: geom.nx[k][f],
                        ny: geom.ny[k][f],
                        fsc: geom.fsc[k][f],
                        bsc: if boundary { -1.0 } else { 1.0 },
                    });
                }
            }
        }
        Ok(Self { nfp, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records of element `k`, `3 * Nfp` of them.
    pub fn element(&self, k: usize) -> &[SurfRecord] {
        &self.records[k * 3 * self.nfp..(k + 1) * 3 * self.nfp]
    }
}
