//! Nodal discontinuous Galerkin time-domain solver for the two-dimensional
//! transverse-magnetic Maxwell equations on unstructured triangle meshes.
//!
//! The right-hand side is split into the three data-parallel stages used by
//! GPU implementations of the method: element-local differentiation, a face
//! flux gather driven by a flat surface descriptor, and an element-local lift.
//! Field data lives in padded, microblocked storage ([`layout::FieldSet`]).
//!
//! ```no_run
//! use dgtd::prelude::*;
//!
//! let reference = ReferenceElement::new(4).unwrap();
//! let mesh = Mesh::rectangle(8, 8, Rect::unit()).unwrap();
//! let op = MaxwellOperator::<f64>::builder(&mesh, &reference).build().unwrap();
//! let q = op.zeros();
//! let rhs = op.rhs(&q);
//! assert_eq!(rhs.layout(), q.layout());
//! ```

pub mod driver;
pub mod error;
pub mod kernels;
pub mod layout;
pub mod mesh;
pub mod real;
pub mod refelem;
pub mod timeint;

pub use error::{Error, Result};
pub use real::Real;

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::kernels::{KernelVariant, Material, MaxwellOperator, UpwindFlux};
    pub use crate::layout::{FieldSet, LayoutSpec};
    pub use crate::mesh::{GeomFactors, Mesh, Rect, SurfInfo};
    pub use crate::real::Real;
    pub use crate::refelem::ReferenceElement;
    pub use crate::timeint::{LowStorageRk, RkScheme};
}
