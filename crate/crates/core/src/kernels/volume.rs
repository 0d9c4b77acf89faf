use rayon::prelude::*;

use super::{KernelVariant, MaxwellOperator};
use crate::error::Result;
use crate::layout::FieldSet;
use crate::real::Real;

impl<T: Real> MaxwellOperator<T> {
    /// Element-local differentiation: `Hx' = -Dy Ez / mu`, `Hy' = Dx Ez / mu`,
    /// `Ez' = (Dx Hy - Dy Hx) / eps`, with `Dx = rx Dr + sx Ds` and
    /// `Dy = ry Dr + sy Ds`. Overwrites `out`, including zeroing its padding.
    pub fn volume_rhs(&self, q: &FieldSet<T>, out: &mut FieldSet<T>) -> Result<()> {
        q.check_layout(&self.layout)?;
        out.check_layout(&self.layout)?;
        self.volume_rhs_unchecked(q, out);
        Ok(())
    }

    pub(super) fn volume_rhs_unchecked(&self, q: &FieldSet<T>, out: &mut FieldSet<T>) {
        let mb_size = self.layout.mb_size;
        let [hx, hy, ez] = out.fields_mut();
        hx.par_chunks_mut(mb_size)
            .zip(hy.par_chunks_mut(mb_size))
            .zip(ez.par_chunks_mut(mb_size))
            .enumerate()
            .for_each(|(mb, ((ohx, ohy), oez))| self.volume_block(mb, q, [ohx, ohy, oez]));
    }

    fn volume_block(&self, mb: usize, q: &FieldSet<T>, out: [&mut [T]; 3]) {
        let l = &self.layout;
        let np = l.np;
        let base = mb * l.mb_size;
        let first = mb * l.mb_elems;
        let live = l.k.saturating_sub(first).min(l.mb_elems);
        let [ohx, ohy, oez] = out;

        let mut store = |le: usize, i: usize| {
            let (a, b, c) = self.volume_point(first + le, base + le * np, i, q);
            let idx = le * np + i;
            ohx[idx] = a;
            ohy[idx] = b;
            oez[idx] = c;
        };
        match self.variant {
            KernelVariant::Interleaved => {
                for i in 0..np {
                    for le in 0..live {
                        store(le, i);
                    }
                }
            }
            KernelVariant::ElementWise | KernelVariant::Fused => {
                for le in 0..live {
                    for i in 0..np {
                        store(le, i);
                    }
                }
            }
        }
        for o in [ohx, ohy, oez] {
            o[live * np..].fill(T::zero());
        }
    }

    #[inline(always)]
    fn volume_point(&self, k: usize, off: usize, i: usize, q: &FieldSet<T>) -> (T, T, T) {
        let np = self.layout.np;
        let row_r = &self.dr[i * np..(i + 1) * np];
        let row_s = &self.ds[i * np..(i + 1) * np];
        let hx = &q.hx[off..off + np];
        let hy = &q.hy[off..off + np];
        let ez = &q.ez[off..off + np];

        let z = T::zero();
        let (mut hx_r, mut hx_s, mut hy_r, mut hy_s, mut ez_r, mut ez_s) = (z, z, z, z, z, z);
        for j in 0..np {
            let (dr, ds) = (row_r[j], row_s[j]);
            hx_r += dr * hx[j];
            hx_s += ds * hx[j];
            hy_r += dr * hy[j];
            hy_s += ds * hy[j];
            ez_r += dr * ez[j];
            ez_s += ds * ez[j];
        }

        let (rx, ry, sx, sy) = (self.rx[k], self.ry[k], self.sx[k], self.sy[k]);
        let dx_ez = rx * ez_r + sx * ez_s;
        let dy_ez = ry * ez_r + sy * ez_s;
        let dx_hy = rx * hy_r + sx * hy_s;
        let dy_hx = ry * hx_r + sy * hx_s;
        let c = &self.coeffs;
        (
            -(c.inv_mu * dy_ez),
            c.inv_mu * dx_ez,
            c.inv_eps * (dx_hy - dy_hx),
        )
    }
}
