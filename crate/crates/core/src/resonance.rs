//! Closed-form co-moving force for a delta-resonance polarizability in the
//! nonrelativistic regime, and the rotation-induced acceleration threshold.
//!
//! With a zero-width absorption line at `ω₀` the nonrelativistic force
//! integral collapses to elementary functions of the reduced temperature
//! `χ = ħω₀/2k_B T₂` and the rotation ratio `u = Ω/ω₀`. Everything is
//! normalized to `F₀ = ħVα(0)ω₀⁵/3c⁵`, which makes the results unit-system
//! free.
//!
//! Two forms are provided: the quadratic-in-`u` expansion whose rotation
//! correction is `G(χ) = 2 − 2χ·cothχ + 0.6χ²coth²χ − 0.2χ²`, and the exact
//! (unexpanded) sum over the shifted line positions `ω₀(1 ± u)`. The
//! quadratic form is the second-order Taylor expansion of the exact one,
//! so they agree to `O(u⁴)`.

use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::scalar::Real;
use crate::special::y_coth_y;

/// Dimensionless inputs of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceParams<R: Real> {
    /// Rotation ratio `u = Ω/ω₀ ≥ 0`.
    pub u: R,
    /// Reduced temperature `χ = ħω₀/2k_B T₂ > 0`.
    pub chi: R,
    /// Angle between rotation axis and velocity, radians.
    pub theta: R,
}

impl<R: Real> ResonanceParams<R> {
    /// Builds validated parameters.
    pub fn new(u: R, chi: R, theta: R) -> Result<Self> {
        if !(u.is_finite() && u >= R::zero()) {
            return Err(Error::invalid("u", format!("must be >= 0, got {u}")));
        }
        if !(chi.is_finite() && chi > R::zero()) {
            return Err(Error::invalid("chi", format!("must be > 0, got {chi}")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid(
                "theta",
                format!("must be finite, got {theta}"),
            ));
        }
        Ok(Self { u, chi, theta })
    }
}

/// Rotation correction `G(χ) = 2 − 2χ·cothχ + 0.6χ²coth²χ − 0.2χ²`.
///
/// Negative `G` means fast enough rotation flips the force from friction to
/// acceleration. A series branch `0.6 − (7/15)χ²` takes over below
/// `χ = 1e-3`.
pub fn rotation_correction_g<R: Real>(chi: R) -> R {
    if chi.abs() < R::lit(1e-3) {
        return R::lit(0.6) - R::lit(7.0 / 15.0) * chi * chi;
    }
    let xc = y_coth_y(chi); // χ·coth(χ)
    R::lit(2.0) - R::lit(2.0) * xc + R::lit(0.6) * xc * xc - R::lit(0.2) * chi * chi
}

/// `1/sinh²(x)` with overflow saturating to zero.
fn inv_sinh_sq<R: Real>(x: R) -> R {
    let s = x.sinh();
    (s * s).recip()
}

/// Normalized co-moving force, quadratic in the rotation ratio:
/// `f = −(χ/sinh²χ)·[1 + u²(3 + cos²θ)·G(χ)]`.
pub fn resonance_force_quadratic<R: Real>(params: &ResonanceParams<R>) -> R {
    let ResonanceParams { u, chi, theta } = *params;
    let cos2 = theta.cos() * theta.cos();
    let correction = u * u * (R::lit(3.0) + cos2) * rotation_correction_g(chi);
    -chi * inv_sinh_sq(chi) * (R::one() + correction)
}

/// One shifted-line term `v⁵/sinh²(χv)`, with the removable `0/0` at
/// `v = 0` replaced by its limit branch `v³/χ²·(1 − (χv)²/3)` for
/// `|v| < 1e-4`.
fn shifted_line_term<R: Real>(v: R, chi: R) -> R {
    if v.abs() < R::lit(1e-4) {
        let cv = chi * v;
        v.powi(3) / (chi * chi) * (R::one() - cv * cv * R::lit(1.0 / 3.0))
    } else {
        v.powi(5) * inv_sinh_sq(chi * v)
    }
}

/// Normalized co-moving force without expanding in the rotation ratio:
///
/// `f = −(χ/10)·{ 2(1+sin²θ)/sinh²χ
///              + (3+cos²θ)·[(1−u)⁵/sinh²(χ(1−u)) + (1+u)⁵/sinh²(χ(1+u))] }`.
///
/// Derivation sketch: a zero-width line contributes
/// `α″(ω) = (πα(0)ω₀/2)[δ(ω−ω₀) − δ(ω+ω₀)]` under the nonrelativistic
/// force integral whose kernel `g(ω) = ω⁵/sinh²(ħω/2k_BT₂)` is odd. The
/// unshifted term samples `2g(ω₀)`; the rotation-shifted term samples
/// `g(ω₀−Ω) + g(ω₀+Ω)`, i.e. the line positions `ω₀(1 ∓ u)`. Normalizing
/// by `F₀ = ħVα(0)ω₀⁵/3c⁵` leaves the closed form above, valid for any
/// `u ≥ 0` including the co-rotating crossover at `u = 1` (where the
/// `(1−u)` term passes through a removable zero and turns negative).
pub fn resonance_force_exact<R: Real>(params: &ResonanceParams<R>) -> R {
    let ResonanceParams { u, chi, theta } = *params;
    let cos2 = theta.cos() * theta.cos();
    let sin2 = theta.sin() * theta.sin();
    let static_line = R::lit(2.0) * (R::one() + sin2) * inv_sinh_sq(chi);
    let shifted = (R::lit(3.0) + cos2)
        * (shifted_line_term(R::one() - u, chi) + shifted_line_term(R::one() + u, chi));
    -chi * R::lit(0.1) * (static_line + shifted)
}

/// Rotation ratio above which the quadratic-form force turns positive:
/// `u* = 1/√(−(3+cos²θ)·G(χ))`, or `None` where `G(χ) ≥ 0` and no amount
/// of (perturbative) rotation can accelerate.
pub fn acceleration_threshold<R: Real>(chi: R, theta: R) -> Option<R> {
    let g = rotation_correction_g(chi);
    if g < R::zero() {
        let cos2 = theta.cos() * theta.cos();
        Some((-(R::lit(3.0) + cos2) * g).sqrt().recip())
    } else {
        None
    }
}

/// The two roots of `G(χ) = 0` bracketing the reduced temperatures where
/// rotation can accelerate, found by bisection.
pub fn acceleration_window<R: Real>() -> (R, R) {
    // G > 0 below ~1.32 and above ~3.60, negative in between; fixed
    // brackets around those sign changes are safe for the smooth G.
    let tol = R::lit(1e-8);
    let lo = bisect(rotation_correction_g::<R>, R::lit(0.5), R::lit(2.0), tol)
        .expect("G changes sign in [0.5, 2]");
    let hi = bisect(rotation_correction_g::<R>, R::lit(2.0), R::lit(5.0), tol)
        .expect("G changes sign in [2, 5]");
    (lo, hi)
}

/// One row of the normalized-force curve family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Row<R: Real> {
    /// Reduced temperature of the curve.
    pub chi: R,
    /// Rotation ratio of the sample.
    pub u: R,
    /// Quadratic-form normalized force.
    pub f_quadratic: R,
    /// Exact-form normalized force.
    pub f_exact: R,
}

/// Tabulates both normalized-force forms over a `u` grid for each `χ`,
/// chi-major and u-minor, at a fixed tilt angle.
pub fn fig2_curves<R: Real>(u_grid: &[R], chi_list: &[R], theta: R) -> Vec<Fig2Row<R>> {
    let mut rows = Vec::with_capacity(u_grid.len() * chi_list.len());
    for &chi in chi_list {
        for &u in u_grid {
            let params = ResonanceParams { u, chi, theta };
            rows.push(Fig2Row {
                chi,
                u,
                f_quadratic: resonance_force_quadratic(&params),
                f_exact: resonance_force_exact(&params),
            });
        }
    }
    rows
}
