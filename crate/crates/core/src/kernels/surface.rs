use rayon::prelude::*;

use super::{FacePoint, MaxwellOperator};
use crate::error::{Error, Result};
use crate::layout::FieldSet;
use crate::real::Real;

/// `Fsc`-scaled face flux values, one entry per surface record and field.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxBuffer<T> {
    pub hx: Vec<T>,
    pub hy: Vec<T>,
    pub ez: Vec<T>,
}

impl<T: Real> FluxBuffer<T> {
    pub fn zeros(len: usize) -> Self {
        Self {
            hx: vec![T::zero(); len],
            hy: vec![T::zero(); len],
            ez: vec![T::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.hx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hx.is_empty()
    }
}

impl<T: Real> MaxwellOperator<T> {
    #[inline(always)]
    fn flux_point(&self, fp: &FacePoint<T>, q: &FieldSet<T>) -> (T, T, T) {
        let c = &self.coeffs;
        let dhx = q.hx[fp.m] - q.hx[fp.p];
        let dhy = q.hy[fp.m] - q.hy[fp.p];
        let dez = q.ez[fp.m] - fp.bsc * q.ez[fp.p];
        let (nx, ny) = (fp.nx, fp.ny);
        let ndotdh = nx * dhx + ny * dhy;
        (
            fp.fsc * (c.inv_mu * (ny * dez) + c.penalty * (nx * ndotdh - dhx)),
            fp.fsc * (-(c.inv_mu * (nx * dez)) + c.penalty * (ny * ndotdh - dhy)),
            fp.fsc * (c.inv_eps * (ny * dhx - nx * dhy) - c.penalty * dez),
        )
    }

    /// Upwind flux jumps at every face point, scaled by `Fsc`.
    ///
    /// The exterior `Ez` is `Bsc * Ez[idP]`; on the boundary `idP = idM` and
    /// `Bsc = -1`, which mirrors `Ez` and leaves `H` continuous (PEC wall).
    pub fn flux_gather(&self, q: &FieldSet<T>, flux: &mut FluxBuffer<T>) -> Result<()> {
        q.check_layout(&self.layout)?;
        if flux.len() != self.surf.len() {
            return Err(Error::LayoutMismatch(format!(
                "flux buffer holds {} points, expected {}",
                flux.len(),
                self.surf.len()
            )));
        }
        let chunk = 3 * self.nfp;
        flux.hx
            .par_chunks_mut(chunk)
            .zip(flux.hy.par_chunks_mut(chunk))
            .zip(flux.ez.par_chunks_mut(chunk))
            .zip(self.surf.par_chunks(chunk))
            .for_each(|(((fhx, fhy), fez), recs)| {
                for (i, fp) in recs.iter().enumerate() {
                    let (a, b, c) = self.flux_point(fp, q);
                    fhx[i] = a;
                    fhy[i] = b;
                    fez[i] = c;
                }
            });
        Ok(())
    }

    /// `out += 1/2 LIFT f` per element and field.
    pub fn surface_lift(&self, flux: &FluxBuffer<T>, out: &mut FieldSet<T>) -> Result<()> {
        out.check_layout(&self.layout)?;
        if flux.len() != self.surf.len() {
            return Err(Error::LayoutMismatch(format!(
                "flux buffer holds {} points, expected {}",
                flux.len(),
                self.surf.len()
            )));
        }
        let chunk = 3 * self.nfp;
        self.for_each_microblock(out, |k, dst| {
            let r = k * chunk..(k + 1) * chunk;
            self.lift_element([&flux.hx[r.clone()], &flux.hy[r.clone()], &flux.ez[r]], dst);
        });
        Ok(())
    }

    /// Gather and lift fused per element; no global flux buffer.
    pub(super) fn surface_fused(&self, q: &FieldSet<T>, out: &mut FieldSet<T>) {
        let chunk = 3 * self.nfp;
        self.for_each_microblock(out, |k, dst| {
            let mut local = vec![T::zero(); 3 * chunk];
            let (fhx, rest) = local.split_at_mut(chunk);
            let (fhy, fez) = rest.split_at_mut(chunk);
            for (i, fp) in self.surf[k * chunk..(k + 1) * chunk].iter().enumerate() {
                let (a, b, c) = self.flux_point(fp, q);
                fhx[i] = a;
                fhy[i] = b;
                fez[i] = c;
            }
            self.lift_element([fhx, fhy, fez], dst);
        });
    }

    /// Runs `f(k, [hx, hy, ez])` for every live element, in parallel over microblocks.
    fn for_each_microblock<F>(&self, out: &mut FieldSet<T>, f: F)
    where
        F: Fn(usize, [&mut [T]; 3]) + Sync,
    {
        let l = self.layout;
        let [hx, hy, ez] = out.fields_mut();
        hx.par_chunks_mut(l.mb_size)
            .zip(hy.par_chunks_mut(l.mb_size))
            .zip(ez.par_chunks_mut(l.mb_size))
            .enumerate()
            .for_each(|(mb, ((ohx, ohy), oez))| {
                let first = mb * l.mb_elems;
                let live = l.k.saturating_sub(first).min(l.mb_elems);
                for le in 0..live {
                    let r = le * l.np..(le + 1) * l.np;
                    f(
                        first + le,
                        [&mut ohx[r.clone()], &mut ohy[r.clone()], &mut oez[r]],
                    );
                }
            });
    }

    /// Lift of one element's face fluxes, unrolled over the three faces.
    #[inline(always)]
    fn lift_element(&self, flux: [&[T]; 3], out: [&mut [T]; 3]) {
        let (np, nfp) = (self.layout.np, self.nfp);
        let half = T::of(0.5);
        let [fhx, fhy, fez] = flux;
        let [ohx, ohy, oez] = out;
        for n in 0..np {
            let row = &self.lift[n * 3 * nfp..(n + 1) * 3 * nfp];
            let z = T::zero();
            let (mut shx, mut shy, mut sez) = (z, z, z);
            for j in 0..nfp {
                let (a, b, c) = (row[j], row[nfp + j], row[2 * nfp + j]);
                shx += a * fhx[j] + b * fhx[nfp + j] + c * fhx[2 * nfp + j];
                shy += a * fhy[j] + b * fhy[nfp + j] + c * fhy[2 * nfp + j];
                sez += a * fez[j] + b * fez[nfp + j] + c * fez[2 * nfp + j];
            }
            ohx[n] += half * shx;
            ohy[n] += half * shy;
            oez[n] += half * sez;
        }
    }
}
