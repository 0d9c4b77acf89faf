//! Padded, microblocked storage for nodal field data.
//!
//! Elements are grouped into microblocks of `mb_elems` elements stored
//! back-to-back at stride `Np`; each microblock is then padded to a multiple
//! of the alignment granularity. The element count is padded up to a whole
//! number of microblocks with ghost elements whose slots stay zero.

use crate::error::{Error, Result};
use crate::real::Real;

pub const DEFAULT_ALIGN: usize = 16;
pub const DEFAULT_WASTE_THRESHOLD: f64 = 0.10;
pub const DEFAULT_MB_MAX: usize = 16;

/// Smallest multiple of `align` that is at least `n`.
pub fn padded_size(n: usize, align: usize) -> usize {
    assert!(align >= 1, "alignment must be positive");
    n.div_ceil(align) * align
}

/// Fraction of a padded microblock of `mb_elems` elements left unused.
pub fn waste_fraction(np: usize, align: usize, mb_elems: usize) -> f64 {
    let used = np * mb_elems;
    let total = padded_size(used, align);
    (total - used) as f64 / total as f64
}

/// Picks the microblock size among powers of two up to `mb_max`.
///
/// Returns the smallest candidate whose padding waste does not exceed
/// `waste_threshold`, or the least wasteful one (smallest on ties) if none does.
pub fn choose_microblock(np: usize, align: usize, waste_threshold: f64, mb_max: usize) -> usize {
    let candidates = std::iter::successors(Some(1usize), |&m| m.checked_mul(2))
        .take_while(|&m| m <= mb_max.max(1));
    let mut best = (f64::INFINITY, 1);
    for mb in candidates {
        let waste = waste_fraction(np, align, mb);
        if waste <= waste_threshold {
            return mb;
        }
        if waste < best.0 {
            best = (waste, mb);
        }
    }
    best.1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayoutSpec {
    pub np: usize,
    pub align: usize,
    pub mb_elems: usize,
    /// Padded values per microblock.
    pub mb_size: usize,
    pub k: usize,
    /// `k` rounded up to a whole number of microblocks.
    pub k_pad: usize,
}

impl LayoutSpec {
    pub fn new(np: usize, k: usize, align: usize, mb_elems: usize) -> Result<Self> {
        if np == 0 || align == 0 || mb_elems == 0 {
            return Err(Error::LayoutMismatch(format!(
                "np ({np}), align ({align}) and mb_elems ({mb_elems}) must be positive"
            )));
        }
        Ok(Self {
            np,
            align,
            mb_elems,
            mb_size: padded_size(np * mb_elems, align),
            k,
            k_pad: k.div_ceil(mb_elems) * mb_elems,
        })
    }

    /// Layout with an automatically chosen microblock size.
    pub fn auto(np: usize, k: usize, align: usize, waste_threshold: f64, mb_max: usize) -> Result<Self> {
        Self::new(np, k, align, choose_microblock(np, align, waste_threshold, mb_max))
    }

    pub fn num_microblocks(&self) -> usize {
        self.k_pad / self.mb_elems
    }

    pub fn storage_len(&self) -> usize {
        self.num_microblocks() * self.mb_size
    }

    pub fn waste_fraction(&self) -> f64 {
        waste_fraction(self.np, self.align, self.mb_elems)
    }

    /// Flat storage offset of element `k`'s first DOF (ghost elements allowed).
    #[inline]
    pub fn element_offset(&self, k: usize) -> usize {
        (k / self.mb_elems) * self.mb_size + (k % self.mb_elems) * self.np
    }

    /// Flat storage index of local DOF `n` of element `k`.
    pub fn dof_index(&self, k: usize, n: usize) -> Result<usize> {
        if k >= self.k || n >= self.np {
            return Err(Error::OutOfRange(format!(
                "(element {k}, dof {n}) outside {} elements x {} dofs",
                self.k, self.np
            )));
        }
        Ok(self.element_offset(k) + n)
    }

    /// Whether a flat slot holds a real element DOF.
    pub fn is_live(&self, idx: usize) -> bool {
        let within = idx % self.mb_size;
        let k = (idx / self.mb_size) * self.mb_elems + within / self.np;
        within < self.np * self.mb_elems && k < self.k
    }
}

/// Storage for the three TM fields `Hx`, `Hy`, `Ez` under one layout.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet<T> {
    layout: LayoutSpec,
    pub hx: Vec<T>,
    pub hy: Vec<T>,
    pub ez: Vec<T>,
}

impl<T: Real> FieldSet<T> {
    pub fn zeros(layout: LayoutSpec) -> Self {
        let n = layout.storage_len();
        Self {
            layout,
            hx: vec![T::zero(); n],
            hy: vec![T::zero(); n],
            ez: vec![T::zero(); n],
        }
    }

    pub fn layout(&self) -> &LayoutSpec {
        &self.layout
    }

    pub fn fields(&self) -> [&[T]; 3] {
        [&self.hx, &self.hy, &self.ez]
    }

    pub fn fields_mut(&mut self) -> [&mut Vec<T>; 3] {
        [&mut self.hx, &mut self.hy, &mut self.ez]
    }

    /// Scatters element-major unpadded vectors (`K * Np` values each).
    pub fn from_element_vectors(layout: LayoutSpec, fields: [&[f64]; 3]) -> Result<Self> {
        let mut out = Self::zeros(layout);
        out.scatter(fields)?;
        Ok(out)
    }

    pub fn scatter(&mut self, fields: [&[f64]; 3]) -> Result<()> {
        let l = self.layout;
        for (dst, src) in self.fields_mut().into_iter().zip(fields) {
            if src.len() != l.k * l.np {
                return Err(Error::LayoutMismatch(format!(
                    "expected {} values, got {}",
                    l.k * l.np,
                    src.len()
                )));
            }
            for k in 0..l.k {
                let off = l.element_offset(k);
                for (d, &s) in dst[off..off + l.np].iter_mut().zip(&src[k * l.np..(k + 1) * l.np]) {
                    *d = T::of(s);
                }
            }
        }
        Ok(())
    }

    /// Gathers the live DOFs back into element-major unpadded vectors.
    pub fn gather(&self) -> [Vec<f64>; 3] {
        let l = self.layout;
        self.fields().map(|src| {
            let mut out = Vec::with_capacity(l.k * l.np);
            for k in 0..l.k {
                let off = l.element_offset(k);
                out.extend(src[off..off + l.np].iter().map(|v| v.wide()));
            }
            out
        })
    }

    pub fn element(&self, field: usize, k: usize) -> &[T] {
        let off = self.layout.element_offset(k);
        &self.fields()[field][off..off + self.layout.np]
    }

    /// True when every padding and ghost slot is exactly zero.
    pub fn padding_is_zero(&self) -> bool {
        let l = self.layout;
        self.fields().iter().all(|f| {
            f.iter()
                .enumerate()
                .all(|(i, v)| l.is_live(i) || *v == T::zero())
        })
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.iter().all(|v| v.is_finite()))
    }

    pub fn check_layout(&self, other: &LayoutSpec) -> Result<()> {
        if &self.layout != other {
            return Err(Error::LayoutMismatch(format!(
                "{:?} vs {:?}",
                self.layout, other
            )));
        }
        Ok(())
    }

    /// Largest absolute value over all fields.
    pub fn max_abs(&self) -> f64 {
        self.fields()
            .iter()
            .flat_map(|f| f.iter())
            .fold(0.0, |m, v| m.max(v.wide().abs()))
    }

    /// Same values stored under a different layout or precision.
    pub fn relayout<U: Real>(&self, layout: LayoutSpec) -> Result<FieldSet<U>> {
        let g = self.gather();
        FieldSet::from_element_vectors(layout, [&g[0], &g[1], &g[2]])
    }
}
