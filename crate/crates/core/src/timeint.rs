//! Explicit low-storage Runge-Kutta time integration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::layout::FieldSet;
use crate::mesh::GeomFactors;
use crate::real::Real;
use crate::refelem::ReferenceElement;

/// Coefficients of a 2N-storage Runge-Kutta scheme.
///
/// Each stage performs `res = a_i res + dt f(t + c_i dt, q)` followed by
/// `q = q + b_i res`.
#[derive(Clone, Debug, PartialEq)]
pub struct RkScheme {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl RkScheme {
    /// Five-stage fourth-order scheme of Carpenter and Kennedy.
    pub fn lsrk54() -> Self {
        Self {
            a: vec![
                0.0,
                -567301805773.0 / 1357537059087.0,
                -2404267990393.0 / 2016746695238.0,
                -3550918686646.0 / 2091501179385.0,
                -1275806237668.0 / 842570457699.0,
            ],
            b: vec![
                1432997174477.0 / 9575080441755.0,
                5161836677717.0 / 13612068292357.0,
                1720146321549.0 / 2090206949498.0,
                3134564353537.0 / 4481467310338.0,
                2277821191437.0 / 14882151754819.0,
            ],
            c: vec![
                0.0,
                1432997174477.0 / 9575080441755.0,
                2526269341429.0 / 6820363962896.0,
                2006345519317.0 / 3224310063776.0,
                2802321613138.0 / 2924317926251.0,
            ],
        }
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }
}

impl Default for RkScheme {
    fn default() -> Self {
        Self::lsrk54()
    }
}

/// State vector that can be advanced by a low-storage scheme.
pub trait RkState: Sized {
    fn zeros_like(&self) -> Self;

    /// `res = a res + dt rhs; self += b res`
    fn stage_update(&mut self, res: &mut Self, rhs: &Self, a: f64, b: f64, dt: f64);

    fn all_finite(&self) -> bool;
}

impl RkState for Vec<f64> {
    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn stage_update(&mut self, res: &mut Self, rhs: &Self, a: f64, b: f64, dt: f64) {
        for ((q, r), k) in self.iter_mut().zip(res.iter_mut()).zip(rhs) {
            *r = a * *r + dt * k;
            *q += b * *r;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl<T: Real> RkState for FieldSet<T> {
    fn zeros_like(&self) -> Self {
        FieldSet::zeros(*self.layout())
    }

    fn stage_update(&mut self, res: &mut Self, rhs: &Self, a: f64, b: f64, dt: f64) {
        let (a, b, dt) = (T::of(a), T::of(b), T::of(dt));
        for ((q, r), k) in self
            .fields_mut()
            .into_iter()
            .zip(res.fields_mut())
            .zip(rhs.fields())
        {
            q.par_iter_mut()
                .zip(r.par_iter_mut())
                .zip(k.par_iter())
                .for_each(|((q, r), &k)| {
                    *r = a * *r + dt * k;
                    *q += b * *r;
                });
        }
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

/// Integrator owning the residual and stage-RHS registers.
pub struct LowStorageRk<S> {
    scheme: RkScheme,
    res: S,
    stage_rhs: S,
    steps: usize,
    time: f64,
}

impl<S: RkState> LowStorageRk<S> {
    pub fn new(scheme: RkScheme, template: &S, t0: f64) -> Self {
        Self {
            scheme,
            res: template.zeros_like(),
            stage_rhs: template.zeros_like(),
            steps: 0,
            time: t0,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances `q` by `dt`; `rhs(t, q, out)` must overwrite `out`.
    pub fn step<F>(&mut self, q: &mut S, dt: f64, mut rhs: F) -> Result<()>
    where
        F: FnMut(f64, &S, &mut S),
    {
        assert!(dt > 0.0, "time step must be positive");
        for i in 0..self.scheme.stages() {
            rhs(self.time + self.scheme.c[i] * dt, q, &mut self.stage_rhs);
            q.stage_update(
                &mut self.res,
                &self.stage_rhs,
                self.scheme.a[i],
                self.scheme.b[i],
                dt,
            );
        }
        self.steps += 1;
        self.time += dt;
        if !q.all_finite() {
            return Err(Error::Divergence {
                step: self.steps,
                time: self.time,
            });
        }
        Ok(())
    }
}

/// Single step with freshly allocated registers.
pub fn rk_step<S, F>(q: &mut S, t: f64, dt: f64, scheme: &RkScheme, rhs: F) -> Result<()>
where
    S: RkState,
    F: FnMut(f64, &S, &mut S),
{
    LowStorageRk::new(scheme.clone(), q, t).step(q, dt, rhs)
}

/// Stable step estimate `cfl * (2/3) / (N+1)^2 * min(1 / Fsc)` for unit wave speed.
pub fn estimate_dt(geom: &GeomFactors, reference: &ReferenceElement, cfl: f64) -> f64 {
    let max_fsc = geom
        .fsc
        .iter()
        .flat_map(|f| f.iter().copied())
        .fold(0.0, f64::max);
    let n1 = (reference.degree + 1) as f64;
    cfl * (2.0 / 3.0) / (n1 * n1) / max_fsc
}
