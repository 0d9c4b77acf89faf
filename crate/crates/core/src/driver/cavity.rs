use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::Material;
use crate::mesh::Mesh;

/// Resonant `(m, n)` mode of the PEC unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityMode {
    pub m: usize,
    pub n: usize,
    pub material: Material,
}

impl CavityMode {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            material: Material::default(),
        }
    }

    /// Checks that `mesh` covers the unit square before returning the mode.
    pub fn on_mesh(m: usize, n: usize, material: Material, mesh: &Mesh) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config("cavity mode indices must be >= 1".into()));
        }
        let b = mesh.bounding_box();
        let unit = [b.x0, b.y0].iter().all(|v| v.abs() < 1e-12)
            && [b.x1, b.y1].iter().all(|v| (v - 1.0).abs() < 1e-12)
            && (mesh.area() - 1.0).abs() < 1e-10;
        if !unit {
            return Err(Error::UnsupportedReference(format!(
                "cavity modes need the unit square, mesh spans [{}, {}] x [{}, {}]",
                b.x0, b.x1, b.y0, b.y1
            )));
        }
        Ok(Self { m, n, material })
    }

    pub fn omega(&self) -> f64 {
        let (m, n) = (self.m as f64, self.n as f64);
        self.material.speed() * PI * (m * m + n * n).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega()
    }

    /// `(Hx, Hy, Ez)` at `(x, y, t)`.
    pub fn eval(&self, x: f64, y: f64, t: f64) -> [f64; 3] {
        let (mp, np) = (self.m as f64 * PI, self.n as f64 * PI);
        let w = self.omega();
        let mu = self.material.mu;
        let (sx, cx) = (mp * x).sin_cos();
        let (sy, cy) = (np * y).sin_cos();
        let (st, ct) = (w * t).sin_cos();
        [
            -(np / (mu * w)) * sx * cy * st,
            (mp / (mu * w)) * cx * sy * st,
            sx * sy * ct,
        ]
    }
}

/// Evaluates the cavity mode at a list of points.
pub fn analytic_cavity(mode: &CavityMode, t: f64, points: &[[f64; 2]]) -> [Vec<f64>; 3] {
    let mut out = [
        Vec::with_capacity(points.len()),
        Vec::with_capacity(points.len()),
        Vec::with_capacity(points.len()),
    ];
    for &[x, y] in points {
        let v = mode.eval(x, y, t);
        for (o, v) in out.iter_mut().zip(v) {
            o.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    #[test]
    fn initial_state() {
        let mode = CavityMode::new(1, 1);
        let [hx, hy, ez] = mode.eval(0.5, 0.5, 0.0);
        assert_eq!((hx, hy), (0.0, 0.0));
        assert!((ez - 1.0).abs() < 1e-15);
        let f = analytic_cavity(&mode, 0.0, &[[0.1, 0.7], [0.3, 0.2]]);
        assert!(f[0].iter().chain(&f[1]).all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_non_unit_domain() {
        let m = Mesh::rectangle(2, 2, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        assert!(matches!(
            CavityMode::on_mesh(1, 1, Material::default(), &m),
            Err(Error::UnsupportedReference(_))
        ));
        let m = Mesh::rectangle(2, 2, Rect::unit()).unwrap();
        assert!(CavityMode::on_mesh(1, 2, Material::default(), &m).is_ok());
    }
}
