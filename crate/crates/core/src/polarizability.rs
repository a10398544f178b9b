//! Particle polarizability models.
//!
//! The force and heating integrands only ever see the imaginary part
//! `α″(ω)` of the polarizability, which encodes absorption and is odd in
//! `ω`. Two kinds are supported:
//!
//! * a smooth Lorentz oscillator, usable pointwise inside quadrature, and
//! * a delta resonance (an absorption line of zero width), which is a
//!   distribution rather than a function and is therefore handled only by
//!   the closed forms in [`crate::resonance`]. Pointwise evaluation of the
//!   delta kind is a hard error.
//!
//! The slope `lim_{ω→0} α″(ω)/ω` is part of the model contract: the force
//! integrands need it to remove the `0·∞` points where `α″` multiplies a
//! diverging thermal factor. Smooth models must also decay at least like
//! `ω⁻³` at infinity for the co-moving force integral to converge; the
//! Lorentz form satisfies this.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special;

/// Polarizability model, in volume units (m³ in SI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarizabilityModel<R: Real> {
    /// Smooth Lorentz oscillator:
    /// `α″(ω) = α₀ ω₀² γ_d ω / [(ω₀² − ω²)² + γ_d² ω²]`.
    Lorentz {
        /// Static polarizability α(0).
        alpha0: R,
        /// Resonance frequency ω₀ (rad/s).
        omega0: R,
        /// Damping rate γ_d (rad/s).
        gamma_d: R,
    },
    /// Zero-width absorption line at ω₀ carrying the full oscillator
    /// strength of a static polarizability α(0). Only usable analytically.
    DeltaResonance {
        /// Static polarizability α(0).
        alpha0: R,
        /// Resonance frequency ω₀ (rad/s).
        omega0: R,
    },
}

impl<R: Real> PolarizabilityModel<R> {
    /// Builds a Lorentz model. All parameters must be strictly positive.
    ///
    /// The `γ_d → 0` limit of this model is the delta resonance with the
    /// same `α₀` and `ω₀`; the Kramers–Kronig sum rule
    /// `(1/π)∫ α″(ω)/ω dω = α₀` holds exactly for every `γ_d`.
    pub fn lorentz(alpha0: R, omega0: R, gamma_d: R) -> Result<Self> {
        for (name, value) in [("alpha0", alpha0), ("omega0", omega0), ("gamma_d", gamma_d)] {
            if !(value.is_finite() && value > R::zero()) {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        Ok(Self::Lorentz {
            alpha0,
            omega0,
            gamma_d,
        })
    }

    /// Builds a delta-resonance model.
    pub fn delta_resonance(alpha0: R, omega0: R) -> Result<Self> {
        for (name, value) in [("alpha0", alpha0), ("omega0", omega0)] {
            if !(value.is_finite() && value > R::zero()) {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        Ok(Self::DeltaResonance { alpha0, omega0 })
    }

    /// Static polarizability α(0).
    pub fn static_polarizability(&self) -> R {
        match *self {
            Self::Lorentz { alpha0, .. } | Self::DeltaResonance { alpha0, .. } => alpha0,
        }
    }

    /// Resonance frequency ω₀, defined for both kinds.
    pub fn resonance_frequency(&self) -> Option<R> {
        match *self {
            Self::Lorentz { omega0, .. } | Self::DeltaResonance { omega0, .. } => Some(omega0),
        }
    }

    /// Damping rate of the smooth kind, used for quadrature breakpoint
    /// hints around the absorption line.
    pub fn linewidth(&self) -> Option<R> {
        match *self {
            Self::Lorentz { gamma_d, .. } => Some(gamma_d),
            Self::DeltaResonance { .. } => None,
        }
    }

    /// Whether the model can be evaluated pointwise.
    pub fn is_smooth(&self) -> bool {
        matches!(self, Self::Lorentz { .. })
    }

    /// Imaginary part of the polarizability, `α″(ω)`; odd in `ω`.
    pub fn alpha_imag(&self, omega: R) -> Result<R> {
        Ok(self.alpha_imag_over_omega(omega)? * omega)
    }

    /// `α″(ω)/ω`: even in `ω`, finite and positive everywhere, equal to the
    /// slope of `α″` at the origin when `ω = 0`.
    pub fn alpha_imag_over_omega(&self, omega: R) -> Result<R> {
        match *self {
            Self::Lorentz {
                alpha0,
                omega0,
                gamma_d,
            } => {
                let d = omega0 * omega0 - omega * omega;
                Ok(
                    alpha0 * omega0 * omega0 * gamma_d
                        / (d * d + gamma_d * gamma_d * omega * omega),
                )
            }
            Self::DeltaResonance { .. } => Err(Error::DeltaNotPointwise),
        }
    }

    /// Slope `lim_{ω→0} α″(ω)/ω = α₀ γ_d / ω₀²` for the Lorentz kind.
    pub fn slope_at_zero(&self) -> Result<R> {
        self.alpha_imag_over_omega(R::zero())
    }

    /// The singularity-free composition `α″(ω)·coth(ħω/2k_B T)`.
    ///
    /// Even in `ω`, finite at the origin with value `(2 k_B T/ħ)·α″′(0)`.
    /// A series branch takes over for `|ħω/2k_B T| < 1e-4`.
    pub fn alpha_imag_coth(
        &self,
        omega: R,
        temperature: R,
        consts: &PhysicalConstants<R>,
    ) -> Result<R> {
        if !(temperature.is_finite() && temperature > R::zero()) {
            return Err(Error::invalid(
                "temperature",
                format!("must be > 0, got {temperature}"),
            ));
        }
        self.alpha_imag_coth_wt(omega, consts.thermal_frequency(temperature))
    }

    /// As [`alpha_imag_coth`](Self::alpha_imag_coth) but with the
    /// temperature already converted to a thermal frequency `k_B T/ħ`.
    pub(crate) fn alpha_imag_coth_wt(&self, omega: R, w_t: R) -> Result<R> {
        let y = omega / (R::lit(2.0) * w_t);
        if y.abs() < R::lit(1e-4) {
            // α″(ω)·coth(y) = [α″(ω)/ω]·2w_T·(y coth y), with the series of
            // y·coth(y) = 1 + y²/3 − y⁴/45 + O(y⁶).
            let y2 = y * y;
            let series = R::one() + y2 * (R::lit(1.0 / 3.0) - y2 * R::lit(1.0 / 45.0));
            Ok(self.alpha_imag_over_omega(omega)? * (R::lit(2.0) * w_t) * series)
        } else {
            Ok(self.alpha_imag(omega)? * special::coth(y))
        }
    }

    /// Regularized `α″(ω)·n(ω)` with the thermal occupation
    /// `n = 1/(e^{ω/w_T} − 1)`; finite everywhere including `ω = 0`.
    pub(crate) fn alpha_bose_wt(&self, omega: R, w_t: R) -> Result<R> {
        Ok(self.alpha_imag_over_omega(omega)? * w_t * special::y_over_expm1(omega / w_t))
    }
}

/// Reduced temperature `χ = ħω₀ / 2 k_B T₂` of a resonance against a bath.
pub fn reduced_chi<R: Real>(omega0: R, t2: R, consts: &PhysicalConstants<R>) -> Result<R> {
    if !(omega0.is_finite() && omega0 > R::zero()) {
        return Err(Error::invalid(
            "omega0",
            format!("must be > 0, got {omega0}"),
        ));
    }
    if !(t2.is_finite() && t2 > R::zero()) {
        return Err(Error::invalid("t2", format!("must be > 0, got {t2}")));
    }
    Ok(omega0 / (R::lit(2.0) * consts.thermal_frequency(t2)))
}
