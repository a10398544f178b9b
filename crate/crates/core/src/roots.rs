//! Scalar root bracketing by bisection.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bisects `f` on `[lo, hi]` down to an interval narrower than `x_tol`.
///
/// Requires a sign change over the bracket (an exact zero at either edge is
/// accepted directly). Bisection is slow but unconditionally convergent,
/// which is all the closed-form threshold work here needs.
pub fn bisect<R: Real, F: Fn(R) -> R>(f: F, lo: R, hi: R, x_tol: R) -> Result<R> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(
            "bracket",
            format!("need lo < hi, got [{lo}, {hi}]"),
        ));
    }
    if !(x_tol.is_finite() && x_tol > R::zero()) {
        return Err(Error::invalid("x_tol", format!("must be > 0, got {x_tol}")));
    }

    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == R::zero() {
        return Ok(a);
    }
    if fb == R::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }

    // 200 iterations cover any representable interval long before this.
    for _ in 0..200 {
        let mid = R::lit(0.5) * (a + b);
        if b - a < x_tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == R::zero() {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(R::lit(0.5) * (a + b))
}
