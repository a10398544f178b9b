//! Physical constants and unit conversions.
//!
//! Defaults are the CODATA 2018 values (exact by the 2019 SI redefinition
//! for all three constants used here). The set can be overridden only as a
//! whole, which is how reduced-unit runs (`ħ = k_B = c = 1`) are set up for
//! testing; individual constants can never be swapped out in isolation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reduced Planck constant ħ in J·s (h exact by SI definition, ħ = h/2π).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Boltzmann constant k_B in J/K (exact by SI definition).
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;
/// Speed of light in vacuum c in m/s (exact by SI definition).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// The complete set of physical constants the formulas depend on.
///
/// Immutable after construction; every evaluator takes the set explicitly so
/// a run is self-consistent by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<R: Real> {
    hbar: R,
    k_b: R,
    c: R,
}

impl<R: Real> PhysicalConstants<R> {
    /// Builds a custom constant set. All three values must be strictly
    /// positive and finite.
    pub fn new(hbar: R, k_b: R, c: R) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("k_b", k_b), ("c", c)] {
            if !(value.is_finite() && value > R::zero()) {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        Ok(Self { hbar, k_b, c })
    }

    /// CODATA SI values.
    pub fn codata() -> Self {
        Self {
            hbar: R::lit(HBAR_SI),
            k_b: R::lit(BOLTZMANN_SI),
            c: R::lit(SPEED_OF_LIGHT_SI),
        }
    }

    /// Reduced units `ħ = k_B = c = 1`, convenient for tests and
    /// convention-free comparisons.
    pub fn reduced() -> Self {
        Self {
            hbar: R::one(),
            k_b: R::one(),
            c: R::one(),
        }
    }

    /// Reduced Planck constant ħ.
    pub fn hbar(&self) -> R {
        self.hbar
    }

    /// Boltzmann constant k_B.
    pub fn k_b(&self) -> R {
        self.k_b
    }

    /// Speed of light c.
    pub fn c(&self) -> R {
        self.c
    }

    /// Thermal angular frequency `k_B T / ħ` of a temperature, in rad/s.
    ///
    /// Temperatures are converted exactly once at this boundary; the inner
    /// math works in frequencies only.
    pub fn thermal_frequency(&self, temperature: R) -> R {
        self.k_b * temperature / self.hbar
    }

    /// Characteristic thermal photon wavelength `2πħc / k_B T`.
    pub fn thermal_wavelength(&self, temperature: R) -> R {
        R::lit(2.0) * R::PI() * self.hbar * self.c / (self.k_b * temperature)
    }
}

impl<R: Real> Default for PhysicalConstants<R> {
    fn default() -> Self {
        Self::codata()
    }
}
