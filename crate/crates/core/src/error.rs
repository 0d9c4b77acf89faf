use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building or running a discretization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {0} outside supported range 1..={max}", max = crate::refelem::MAX_DEGREE)]
    UnsupportedDegree(usize),

    #[error("orthonormal mode ({i}, {j}) out of range (total degree must be <= {max})")]
    ModeOutOfRange { i: usize, j: usize, max: usize },

    #[error("point ({r}, {s}) lies outside the reference triangle")]
    PointOutsideReference { r: f64, s: f64 },

    #[error("degenerate extent: {0}")]
    DegenerateExtent(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("element {element} references vertex {vertex}, but only {count} vertices exist")]
    VertexOutOfRange {
        element: usize,
        vertex: usize,
        count: usize,
    },

    #[error("non-manifold mesh: edge ({0}, {1}) is shared by more than two elements")]
    NonManifold(usize, usize),

    #[error("non-conforming mesh: {0}")]
    NonConforming(String),

    #[error("element {0} is degenerate (zero area)")]
    DegenerateElement(usize),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("solution diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("analytic reference unsupported: {0}")]
    UnsupportedReference(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
