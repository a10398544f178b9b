//! Thermal-occupation kernels shared by the polarizability and force code.
//!
//! Everything here is written so that the removable singularities of
//! `coth` compositions never surface as `0·∞`: the identity
//! `coth(y) = 1 + 2/(e^{2y} − 1)` holds for every `y ≠ 0` regardless of
//! sign, and `y/(e^y − 1)` is finite on the whole axis.

use crate::scalar::Real;

/// Thermal occupation `1/(e^y − 1)`. Diverges at `y = 0`; callers guard.
pub(crate) fn bose<R: Real>(y: R) -> R {
    y.exp_m1().recip()
}

/// `y/(e^y − 1)`, finite everywhere with value 1 at the origin.
pub(crate) fn y_over_expm1<R: Real>(y: R) -> R {
    if y == R::zero() {
        R::one()
    } else {
        y / y.exp_m1()
    }
}

/// `coth(y)` for `y ≠ 0`.
pub(crate) fn coth<R: Real>(y: R) -> R {
    y.tanh().recip()
}

/// `y·coth(y)`, even and finite everywhere (→ 1 as `y → 0`).
///
/// Below `|y| = 1e-4` the Taylor series `1 + y²/3 − y⁴/45` is used; the
/// truncation error there is below 1e-26 relative, so the branch switch is
/// seamless.
pub(crate) fn y_coth_y<R: Real>(y: R) -> R {
    let y2 = y * y;
    if y.abs() < R::lit(1e-4) {
        R::one() + y2 * (R::lit(1.0 / 3.0) - y2 * R::lit(1.0 / 45.0))
    } else {
        y / y.tanh()
    }
}
