use std::fmt::{Debug, Display};

use num_traits::{Float, NumAssign};

/// Floating-point scalar used for field storage and kernel arithmetic.
///
/// Operators and geometry are always assembled in `f64` and narrowed once when
/// an operator is instantiated for a given precision.
pub trait Real: Float + NumAssign + Send + Sync + Debug + Display + Default + 'static {
    const NAME: &'static str;

    fn of(x: f64) -> Self;

    fn wide(self) -> f64;
}

impl Real for f32 {
    const NAME: &'static str = "single";

    #[inline(always)]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline(always)]
    fn wide(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    const NAME: &'static str = "double";

    #[inline(always)]
    fn of(x: f64) -> Self {
        x
    }

    #[inline(always)]
    fn wide(self) -> f64 {
        self
    }
}
