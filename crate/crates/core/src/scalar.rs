//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented for `f32` and `f64`. The physics itself is scalar-agnostic,
/// but note that CODATA SI prefactors (for example `ħ/4πc⁴`) underflow `f32`,
/// so single precision is only useful together with reduced unit systems.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    ///
    /// Panics if the literal is not representable (which for `f32`/`f64`
    /// only happens through programmer error, never through user input).
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("numeric literal must be representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
