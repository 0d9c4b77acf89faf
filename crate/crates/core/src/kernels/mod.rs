//! Right-hand side of the semi-discrete TM Maxwell system.
//!
//! The RHS is evaluated in three stages, mirroring the GPU decomposition:
//!
//! 1. [`MaxwellOperator::volume_rhs`]: element-local differentiation with
//!    per-element geometric factors (overwrites the output);
//! 2. [`MaxwellOperator::flux_gather`]: upwind flux jumps at every face point,
//!    driven by the flat surface descriptor;
//! 3. [`MaxwellOperator::surface_lift`]: element-local lift of the face fluxes,
//!    accumulated into the output.
//!
//! Work is partitioned by microblock. Every output value is produced by one
//! fixed sequence of floating-point operations regardless of the
//! [`KernelVariant`] or microblock size, so all variants agree bit for bit.

mod oracle;
mod surface;
mod volume;

pub use oracle::{dense_oracle_rhs, dense_oracle_volume};
pub use surface::FluxBuffer;

use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::layout::{self, FieldSet, LayoutSpec};
use crate::mesh::{GeomFactors, Mesh, SurfInfo};
use crate::real::Real;
use crate::refelem::ReferenceElement;

/// Loop organisation of the element-local products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    /// One element at a time: its field values stay hot while every matrix row is applied.
    #[default]
    ElementWise,
    /// Matrix row outermost, applied to all elements of a microblock before moving on.
    Interleaved,
    /// Element-wise volume stage; flux gather and lift fused per element with a
    /// local flux buffer instead of a global store/load round trip.
    Fused,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 3] = [Self::ElementWise, Self::Interleaved, Self::Fused];
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ElementWise => "element",
            Self::Interleaved => "interleaved",
            Self::Fused => "fused",
        })
    }
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "element" | "elementwise" => Ok(Self::ElementWise),
            "interleaved" => Ok(Self::Interleaved),
            "fused" => Ok(Self::Fused),
            _ => Err(Error::Config(format!(
                "unknown kernel variant '{s}' (expected element, interleaved or fused)"
            ))),
        }
    }
}

/// Homogeneous material constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub epsilon: f64,
    pub mu: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            mu: 1.0,
        }
    }
}

impl Material {
    pub fn speed(&self) -> f64 {
        1.0 / (self.epsilon * self.mu).sqrt()
    }
}

/// Upwind flux parameters. `alpha = 1` is the upwind flux, `alpha = 0` the central one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpwindFlux {
    pub alpha: f64,
    pub material: Material,
}

impl UpwindFlux {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            material: Material::default(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct FluxCoeffs<T> {
    inv_eps: T,
    inv_mu: T,
    /// `alpha * c`
    penalty: T,
}

/// Surface record with storage indices resolved against a layout.
#[derive(Clone, Copy, Debug)]
struct FacePoint<T> {
    m: usize,
    p: usize,
    nx: T,
    ny: T,
    fsc: T,
    bsc: T,
}

/// Microblock-size selection for an operator's layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Microblock {
    Auto { waste_threshold: f64, mb_max: usize },
    Fixed(usize),
}

impl Default for Microblock {
    fn default() -> Self {
        Microblock::Auto {
            waste_threshold: layout::DEFAULT_WASTE_THRESHOLD,
            mb_max: layout::DEFAULT_MB_MAX,
        }
    }
}

impl Microblock {
    pub fn layout(&self, np: usize, k: usize, align: usize) -> Result<LayoutSpec> {
        match *self {
            Microblock::Auto {
                waste_threshold,
                mb_max,
            } => LayoutSpec::auto(np, k, align, waste_threshold, mb_max),
            Microblock::Fixed(mb) => LayoutSpec::new(np, k, align, mb),
        }
    }
}

pub struct OperatorBuilder<'a, T> {
    precision: PhantomData<T>,
    mesh: &'a Mesh,
    reference: &'a ReferenceElement,
    flux: UpwindFlux,
    align: usize,
    microblock: Microblock,
    variant: KernelVariant,
}

impl<T: Real> OperatorBuilder<'_, T> {
    pub fn alpha(mut self, alpha: f64) -> Self {
        self.flux.alpha = alpha;
        self
    }

    pub fn material(mut self, material: Material) -> Self {
        self.flux.material = material;
        self
    }

    pub fn align(mut self, align: usize) -> Self {
        self.align = align;
        self
    }

    pub fn microblock(mut self, mb: Microblock) -> Self {
        self.microblock = mb;
        self
    }

    pub fn variant(mut self, variant: KernelVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn build(self) -> Result<MaxwellOperator<T>> {
        let geom = GeomFactors::new(self.mesh, self.reference)?;
        let surf = SurfInfo::new(self.mesh, &geom, self.reference)?;
        let np = self.reference.np;
        let k = self.mesh.num_elements();
        let layout = self.microblock.layout(np, k, self.align)?;
        MaxwellOperator::from_parts(self.reference, &geom, &surf, layout, self.flux, self.variant)
    }
}

/// Discrete TM Maxwell operator instantiated for one layout and precision.
#[derive(Clone, Debug)]
pub struct MaxwellOperator<T> {
    layout: LayoutSpec,
    nfp: usize,
    variant: KernelVariant,
    flux: UpwindFlux,
    coeffs: FluxCoeffs<T>,
    /// Row-major `Np x Np`.
    dr: Vec<T>,
    ds: Vec<T>,
    /// Row-major `Np x 3 Nfp`.
    lift: Vec<T>,
    /// Per padded element; ghost elements carry the identity map.
    rx: Vec<T>,
    ry: Vec<T>,
    sx: Vec<T>,
    sy: Vec<T>,
    surf: Vec<FacePoint<T>>,
    det: Vec<f64>,
    mass: DMatrix<f64>,
}

fn narrow<T: Real>(m: &DMatrix<f64>) -> Vec<T> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(T::of(m[(i, j)]));
        }
    }
    out
}

impl<T: Real> MaxwellOperator<T> {
    pub fn builder<'a>(mesh: &'a Mesh, reference: &'a ReferenceElement) -> OperatorBuilder<'a, T> {
        OperatorBuilder {
            precision: PhantomData,
            mesh,
            reference,
            flux: UpwindFlux::new(1.0),
            align: layout::DEFAULT_ALIGN,
            microblock: Microblock::default(),
            variant: KernelVariant::default(),
        }
    }

    pub fn from_parts(
        reference: &ReferenceElement,
        geom: &GeomFactors,
        surf: &SurfInfo,
        layout: LayoutSpec,
        flux: UpwindFlux,
        variant: KernelVariant,
    ) -> Result<Self> {
        let k = geom.num_elements();
        if layout.np != reference.np || layout.k != k {
            return Err(Error::LayoutMismatch(format!(
                "layout {layout:?} does not fit {k} elements of {} dofs",
                reference.np
            )));
        }
        if surf.len() != k * 3 * reference.nfp {
            return Err(Error::LayoutMismatch(format!(
                "surface descriptor has {} records, expected {}",
                surf.len(),
                k * 3 * reference.nfp
            )));
        }
        if !(flux.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", flux.alpha)));
        }

        let pad = |v: &[f64], ghost: f64| -> Vec<T> {
            let mut out: Vec<T> = v.iter().map(|&x| T::of(x)).collect();
            out.resize(layout.k_pad, T::of(ghost));
            out
        };
        let np = reference.np;
        let to_flat = |id: usize| layout.element_offset(id / np) + id % np;
        let surf = surf
            .records
            .iter()
            .map(|r| FacePoint {
                m: to_flat(r.id_m),
                p: to_flat(r.id_p),
                nx: T::of(r.nx),
                ny: T::of(r.ny),
                fsc: T::of(r.fsc),
                bsc: T::of(r.bsc),
            })
            .collect();

        let mat = flux.material;
        Ok(Self {
            layout,
            nfp: reference.nfp,
            variant,
            flux,
            coeffs: FluxCoeffs {
                inv_eps: T::of(1.0 / mat.epsilon),
                inv_mu: T::of(1.0 / mat.mu),
                penalty: T::of(flux.alpha * mat.speed()),
            },
            dr: narrow(&reference.dr),
            ds: narrow(&reference.ds),
            lift: narrow(&reference.lift),
            rx: pad(&geom.rx, 1.0),
            ry: pad(&geom.ry, 0.0),
            sx: pad(&geom.sx, 0.0),
            sy: pad(&geom.sy, 1.0),
            surf,
            det: geom.det.clone(),
            mass: reference.mass.clone(),
        })
    }

    pub fn layout(&self) -> &LayoutSpec {
        &self.layout
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    pub fn flux(&self) -> UpwindFlux {
        self.flux
    }

    pub fn num_face_points(&self) -> usize {
        self.surf.len()
    }

    pub fn zeros(&self) -> FieldSet<T> {
        FieldSet::zeros(self.layout)
    }

    pub fn flux_buffer(&self) -> FluxBuffer<T> {
        FluxBuffer::zeros(self.surf.len())
    }

    /// Full RHS into `out`, using `flux` as scratch for the two-phase variants.
    pub fn compute_rhs(
        &self,
        q: &FieldSet<T>,
        out: &mut FieldSet<T>,
        flux: &mut FluxBuffer<T>,
    ) -> Result<()> {
        q.check_layout(&self.layout)?;
        out.check_layout(&self.layout)?;
        self.volume_rhs_unchecked(q, out);
        match self.variant {
            KernelVariant::Fused => self.surface_fused(q, out),
            _ => {
                self.flux_gather(q, flux)?;
                self.surface_lift(flux, out)?;
            }
        }
        Ok(())
    }

    /// Allocating convenience wrapper around [`Self::compute_rhs`].
    pub fn rhs(&self, q: &FieldSet<T>) -> FieldSet<T> {
        let mut out = self.zeros();
        let mut flux = self.flux_buffer();
        self.compute_rhs(q, &mut out, &mut flux)
            .expect("state layout must match the operator");
        out
    }

    /// Elementwise `M`-weighted inner product over all three fields,
    /// weighted by the material constants.
    pub fn inner(&self, a: &FieldSet<T>, b: &FieldSet<T>) -> f64 {
        let np = self.layout.np;
        let mat = self.flux.material;
        let weights = [mat.mu, mat.mu, mat.epsilon];
        let mut total = 0.0;
        let mut tmp = vec![0.0; np];
        for k in 0..self.layout.k {
            let mut local = 0.0;
            for (field, w) in weights.iter().enumerate() {
                let (ua, ub) = (a.element(field, k), b.element(field, k));
                for (i, t) in tmp.iter_mut().enumerate() {
                    *t = (0..np).map(|j| self.mass[(i, j)] * ub[j].wide()).sum();
                }
                local += w * ua.iter().zip(&tmp).map(|(x, t)| x.wide() * t).sum::<f64>();
            }
            total += self.det[k] * local;
        }
        total
    }

    /// Discrete electromagnetic energy `1/2 <q, q>_M`.
    pub fn energy(&self, q: &FieldSet<T>) -> f64 {
        0.5 * self.inner(q, q)
    }

    /// Approximate floating-point operations per RHS evaluation.
    pub fn flops_per_rhs(&self) -> f64 {
        let (np, nfp, k) = (self.layout.np as f64, self.nfp as f64, self.layout.k as f64);
        // six Np x Np products, geometric combination, lift of three fields, flux
        let volume = 6.0 * 2.0 * np * np + 12.0 * np;
        let lift = 3.0 * 2.0 * np * 3.0 * nfp + 6.0 * np;
        let flux = 3.0 * nfp * 25.0;
        k * (volume + lift + flux)
    }
}
