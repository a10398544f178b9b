//! Kinematic state, bath and particle specifications, and the point-dipole
//! validity checks.
//!
//! Geometry: the particle moves with velocity `βc` along the x axis of the
//! radiation frame and rotates about a unit axis tilted by the angle `θ`
//! against the velocity; only `θ` enters the formulas, so the axis vector is
//! represented through `θ` alone.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::polarizability::PolarizabilityModel;
use crate::scalar::Real;

/// Translational-rotational state of the particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState<R: Real> {
    beta: R,
    omega: R,
    theta: R,
    gamma: R,
}

impl<R: Real> KinematicState<R> {
    /// Builds a state from `β ∈ [0, 1)`, rotation rate `Ω ≥ 0` (rad/s) and
    /// tilt angle `θ ∈ [0, π]`.
    pub fn new(beta: R, omega: R, theta: R) -> Result<Self> {
        if !(beta.is_finite() && beta >= R::zero() && beta < R::one()) {
            return Err(Error::invalid(
                "beta",
                format!("must be in [0, 1), got {beta}"),
            ));
        }
        if !(omega.is_finite() && omega >= R::zero()) {
            return Err(Error::invalid(
                "omega",
                format!("must be >= 0, got {omega}"),
            ));
        }
        if !(theta.is_finite() && theta >= R::zero() && theta <= R::PI()) {
            return Err(Error::invalid(
                "theta",
                format!("must be in [0, pi], got {theta}"),
            ));
        }
        Ok(Self::raw(beta, omega, theta))
    }

    /// Unvalidated constructor for solver internals, where Runge-Kutta
    /// stages may transiently poke slightly outside `[0, 1)`.
    pub(crate) fn raw(beta: R, omega: R, theta: R) -> Self {
        // (1−β)(1+β) keeps full precision as β → 1.
        let gamma = ((R::one() - beta) * (R::one() + beta)).sqrt().recip();
        Self {
            beta,
            omega,
            theta,
            gamma,
        }
    }

    /// Velocity in units of c.
    pub fn beta(&self) -> R {
        self.beta
    }

    /// Rotation rate Ω in rad/s.
    pub fn omega(&self) -> R {
        self.omega
    }

    /// Angle between the rotation axis and the velocity, in radians.
    pub fn theta(&self) -> R {
        self.theta
    }

    /// Lorentz factor `γ = 1/√(1−β²)`.
    pub fn gamma(&self) -> R {
        self.gamma
    }
}

/// Blackbody radiation bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec<R: Real> {
    t2: R,
    w_t2: R,
}

impl<R: Real> BathSpec<R> {
    /// Builds a bath of temperature `T₂ > 0` (kelvin); the thermal frequency
    /// `k_B T₂/ħ` is derived once here.
    pub fn new(t2: R, consts: &PhysicalConstants<R>) -> Result<Self> {
        if !(t2.is_finite() && t2 > R::zero()) {
            return Err(Error::invalid("t2", format!("must be > 0, got {t2}")));
        }
        Ok(Self {
            t2,
            w_t2: consts.thermal_frequency(t2),
        })
    }

    /// Bath temperature T₂ in kelvin.
    pub fn t2(&self) -> R {
        self.t2
    }

    /// Thermal frequency `k_B T₂/ħ` in rad/s.
    pub fn w_t2(&self) -> R {
        self.w_t2
    }
}

/// The particle: mechanical parameters plus its polarizability model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSpec<R: Real> {
    mass: R,
    radius: R,
    t1: R,
    model: PolarizabilityModel<R>,
}

impl<R: Real> ParticleSpec<R> {
    /// Builds a particle with mass (kg), radius (m) and local temperature
    /// `T₁` (K), all strictly positive.
    pub fn new(mass: R, radius: R, t1: R, model: PolarizabilityModel<R>) -> Result<Self> {
        for (name, value) in [("mass", mass), ("radius", radius), ("t1", t1)] {
            if !(value.is_finite() && value > R::zero()) {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        Ok(Self {
            mass,
            radius,
            t1,
            model,
        })
    }

    /// Particle mass in kg.
    pub fn mass(&self) -> R {
        self.mass
    }

    /// Particle radius in m.
    pub fn radius(&self) -> R {
        self.radius
    }

    /// Particle temperature T₁ in kelvin.
    pub fn t1(&self) -> R {
        self.t1
    }

    /// Polarizability model.
    pub fn model(&self) -> &PolarizabilityModel<R> {
        &self.model
    }
}

/// A violated point-dipole condition. Warnings never abort an evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum DipoleWarning<R: Real> {
    /// The equatorial rotation speed `ΩR/c` is not small.
    RotationSpeed {
        /// `ΩR/c` for the offending state.
        omega_r_over_c: R,
    },
    /// The radius is not small against a thermal photon wavelength.
    RadiusVsThermalWavelength {
        /// Which temperature the wavelength belongs to ("T1" or "T2").
        temperature: &'static str,
        /// Particle radius.
        radius: R,
        /// The wavelength `2πħc/k_B T` it is compared against.
        wavelength: R,
    },
}

impl<R: Real> std::fmt::Display for DipoleWarning<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DipoleWarning::RotationSpeed { omega_r_over_c } => write!(
                f,
                "dipole approximation strained: equatorial speed Omega*R/c = {omega_r_over_c} exceeds 0.1"
            ),
            DipoleWarning::RadiusVsThermalWavelength {
                temperature,
                radius,
                wavelength,
            } => write!(
                f,
                "dipole approximation strained: radius {radius} m exceeds a tenth of the {temperature} thermal wavelength {wavelength} m"
            ),
        }
    }
}

/// Checks the point-dipole conditions `ΩR/c ≪ 1` and `R ≪ 2πħc/k_B T_i`
/// for both temperatures, flagging anything past a tenth of the hard limit.
pub fn validate_dipole_conditions<R: Real>(
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    state: &KinematicState<R>,
    consts: &PhysicalConstants<R>,
) -> Vec<DipoleWarning<R>> {
    let tenth = R::lit(0.1);
    let mut warnings = Vec::new();

    let omega_r_over_c = state.omega() * particle.radius() / consts.c();
    if omega_r_over_c > tenth {
        warnings.push(DipoleWarning::RotationSpeed { omega_r_over_c });
    }

    for (label, temperature) in [("T1", particle.t1()), ("T2", bath.t2())] {
        let wavelength = consts.thermal_wavelength(temperature);
        if particle.radius() > tenth * wavelength {
            warnings.push(DipoleWarning::RadiusVsThermalWavelength {
                temperature: label,
                radius: particle.radius(),
                wavelength,
            });
        }
    }

    warnings
}
