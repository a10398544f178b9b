//! Numerics for the translational dynamics of a small rotating polarizable
//! particle moving relativistically through isotropic blackbody radiation.
//!
//! The crate evaluates the lab-frame drag force `F_x` and heating rate `Q̇`,
//! the co-moving tangential force `F′_x` (both directly and through the
//! frame-transform identity `F′_x = F_x − βγ² Q̇/c`), the nonrelativistic
//! limits, closed-form results for a delta-resonance polarizability
//! (including the rotation-induced acceleration threshold), and integrates
//! the resulting deceleration equation.
//!
//! All numeric code is generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`). SI runs want `f64`; `f32` is only adequate for
//! reduced-unit work where [`constants::PhysicalConstants::reduced`] is in
//! play. Concrete `f64` aliases for the main types live at the crate root.

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod forces;
pub mod kinematics;
pub mod polarizability;
pub mod quadrature;
pub mod resonance;
pub mod roots;
pub mod scalar;
mod special;

pub use constants::PhysicalConstants;
pub use error::Error;
pub use forces::{
    force_breakdown, force_comoving, force_comoving_from_lab, force_lab, force_mkrtchian,
    force_nonrel, heating_rate_lab, kernel_k, weight_comoving, weight_lab, ComovingWeight,
    Estimate, ForceBreakdown,
};
pub use kinematics::{
    validate_dipole_conditions, BathSpec, DipoleWarning, KinematicState, ParticleSpec,
};
pub use polarizability::{reduced_chi, PolarizabilityModel};
pub use quadrature::{integrate_finite, integrate_semi_infinite, QuadResult, QuadratureConfig};
pub use resonance::{
    acceleration_threshold, acceleration_window, fig2_curves, resonance_force_exact,
    resonance_force_quadratic, rotation_correction_g, Fig2Row, ResonanceParams,
};
pub use scalar::Real;

/// Concrete `f64` instantiations of the main public types.
pub type PhysicalConstants64 = constants::PhysicalConstants<f64>;
pub type PolarizabilityModel64 = polarizability::PolarizabilityModel<f64>;
pub type BathSpec64 = kinematics::BathSpec<f64>;
pub type ParticleSpec64 = kinematics::ParticleSpec<f64>;
pub type KinematicState64 = kinematics::KinematicState<f64>;
pub type QuadratureConfig64 = quadrature::QuadratureConfig<f64>;
pub type QuadResult64 = quadrature::QuadResult<f64>;
pub type ForceBreakdown64 = forces::ForceBreakdown<f64>;
pub type ResonanceParams64 = resonance::ResonanceParams<f64>;
pub type SolverConfig64 = dynamics::SolverConfig<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
