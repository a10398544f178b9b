//! Run configuration: a strict, sectioned key-value file (TOML syntax)
//! with units spelled out in the key names. Unknown keys are rejected so
//! that a typo can never silently fall back to a default.

use bbfriction::{
    BathSpec64, KinematicState64, ParticleSpec64, PhysicalConstants64, PolarizabilityModel64,
    QuadratureConfig64,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Top-level configuration for `force`, `sweep` and `evolve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathSection,
    pub particle: ParticleSection,
    pub state: StateSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// Complete override of the physical constants (all three together),
    /// intended for reduced-unit runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    /// Bath temperature in kelvin.
    #[serde(rename = "T2_K")]
    pub t2_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    pub mass_kg: f64,
    pub radius_m: f64,
    /// Particle temperature in kelvin.
    #[serde(rename = "T1_K")]
    pub t1_k: f64,
    pub model: ModelSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Smooth Lorentz oscillator, usable by every evaluator.
    Lorentz,
    /// Zero-width resonance; only the closed-form commands accept it.
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub alpha0_m3: f64,
    pub omega0_rad_s: f64,
    /// Lorentz damping rate; required for `lorentz`, forbidden for `delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_d_rad_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    /// Velocity in units of c.
    pub beta: f64,
    /// Rotation rate Ω in rad/s.
    pub omega_rad_s: f64,
    /// Angle between rotation axis and velocity, radians.
    pub theta_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let d = QuadratureConfig64::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_subdivisions: d.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub t_span_s: f64,
    #[serde(default = "default_solver_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_solver_abs_tol")]
    pub abs_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_step_s: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval_s: Option<f64>,
}

fn default_solver_rel_tol() -> f64 {
    1e-6
}
fn default_solver_abs_tol() -> f64 {
    1e-12
}
fn default_max_steps() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Fixed significant digits for CSV numbers; default is the shortest
    /// representation that round-trips.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_digits: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub hbar_j_s: f64,
    #[serde(rename = "k_B_J_per_K")]
    pub k_b_j_per_k: f64,
    pub c_m_per_s: f64,
}

/// Everything a command needs, converted and validated through the core
/// constructors.
pub struct CoreSetup {
    pub consts: PhysicalConstants64,
    pub bath: BathSpec64,
    pub particle: ParticleSpec64,
    pub state: KinematicState64,
    pub quadrature: QuadratureConfig64,
}

impl RunConfig {
    /// Parses and cross-validates a config file's text.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        config.cross_validate()?;
        Ok(config)
    }

    fn cross_validate(&self) -> Result<(), CliError> {
        match (self.particle.model.kind, self.particle.model.gamma_d_rad_s) {
            (ModelKind::Lorentz, None) => Err(CliError::Config(
                "model kind `lorentz` requires `gamma_d_rad_s`".into(),
            )),
            (ModelKind::Delta, Some(_)) => Err(CliError::Config(
                "`gamma_d_rad_s` is only valid for model kind `lorentz`".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Builds the core objects, applying an optional relative-tolerance
    /// override from the command line.
    pub fn to_core(&self, quad_rtol_override: Option<f64>) -> Result<CoreSetup, CliError> {
        let consts = match &self.constants {
            Some(c) => PhysicalConstants64::new(c.hbar_j_s, c.k_b_j_per_k, c.c_m_per_s)?,
            None => PhysicalConstants64::codata(),
        };
        let model = self.build_model()?;
        let bath = BathSpec64::new(self.bath.t2_k, &consts)?;
        let particle = ParticleSpec64::new(
            self.particle.mass_kg,
            self.particle.radius_m,
            self.particle.t1_k,
            model,
        )?;
        let state = KinematicState64::new(
            self.state.beta,
            self.state.omega_rad_s,
            self.state.theta_rad,
        )?;
        let quadrature = QuadratureConfig64 {
            rel_tol: quad_rtol_override.unwrap_or(self.quadrature.rel_tol),
            abs_tol: self.quadrature.abs_tol,
            max_subdivisions: self.quadrature.max_subdivisions,
            breakpoints: Vec::new(),
        };
        Ok(CoreSetup {
            consts,
            bath,
            particle,
            state,
            quadrature,
        })
    }

    pub fn build_model(&self) -> Result<PolarizabilityModel64, CliError> {
        let m = &self.particle.model;
        Ok(match m.kind {
            ModelKind::Lorentz => PolarizabilityModel64::lorentz(
                m.alpha0_m3,
                m.omega0_rad_s,
                m.gamma_d_rad_s.expect("checked by cross_validate"),
            )?,
            ModelKind::Delta => {
                PolarizabilityModel64::delta_resonance(m.alpha0_m3, m.omega0_rad_s)?
            }
        })
    }
}

/// A parameter a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Beta,
    Omega,
    Theta,
    T1,
    T2,
    /// Reduced temperature ħω₀/2k_BT₂; sweeping it re-derives T₂ from the
    /// model's resonance frequency.
    Chi,
    /// Rotation ratio Ω/ω₀; sweeping it re-derives Ω likewise.
    U,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Beta => "beta",
            SweepParam::Omega => "omega",
            SweepParam::Theta => "theta",
            SweepParam::T1 => "T1",
            SweepParam::T2 => "T2",
            SweepParam::Chi => "chi",
            SweepParam::U => "u",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "beta" => SweepParam::Beta,
            "omega" => SweepParam::Omega,
            "theta" => SweepParam::Theta,
            "T1" => SweepParam::T1,
            "T2" => SweepParam::T2,
            "chi" => SweepParam::Chi,
            "u" => SweepParam::U,
            other => {
                return Err(CliError::Config(format!(
                    "unknown sweep parameter `{other}` (expected one of beta, omega, theta, T1, T2, chi, u)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// One sweep axis, parsed from `name:min:max:count[:linear|log]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = spec.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(CliError::Config(format!(
                "axis `{spec}` must look like name:min:max:count[:linear|log]"
            )));
        }
        let param = SweepParam::parse(parts[0])?;
        let bad = |what: &str| CliError::Config(format!("axis `{spec}`: invalid {what}"));
        let min: f64 = parts[1].parse().map_err(|_| bad("min"))?;
        let max: f64 = parts[2].parse().map_err(|_| bad("max"))?;
        let count: usize = parts[3].parse().map_err(|_| bad("count"))?;
        let spacing = match parts.get(4).copied().unwrap_or("linear") {
            "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => {
                return Err(CliError::Config(format!(
                    "axis `{spec}`: unknown spacing `{other}`"
                )))
            }
        };
        if count < 2 {
            return Err(CliError::Config(format!(
                "axis `{spec}`: count must be >= 2"
            )));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(CliError::Config(format!("axis `{spec}`: need min < max")));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(CliError::Config(format!(
                "axis `{spec}`: log spacing needs min > 0"
            )));
        }
        Ok(Self {
            param,
            min,
            max,
            count,
            spacing,
        })
    }

    /// The grid coordinate at index `i` (endpoints included).
    pub fn value_at(&self, i: usize) -> f64 {
        let frac = i as f64 / (self.count - 1) as f64;
        match self.spacing {
            Spacing::Linear => self.min + (self.max - self.min) * frac,
            Spacing::Log => self.min * (self.max / self.min).powf(frac),
        }
    }
}

/// Ordered axes of a Cartesian sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
}

impl SweepSpec {
    pub fn parse(specs: &[String]) -> Result<Self, CliError> {
        if specs.is_empty() {
            return Err(CliError::Config("sweep needs at least one --axis".into()));
        }
        let axes = specs
            .iter()
            .map(|s| SweepAxis::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { axes })
    }

    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Axis coordinates of the flat grid index, last axis fastest.
    pub fn coords(&self, mut index: usize) -> Vec<f64> {
        let mut idx = vec![0usize; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            idx[k] = index % axis.count;
            index /= axis.count;
        }
        self.axes
            .iter()
            .zip(idx)
            .map(|(a, i)| a.value_at(i))
            .collect()
    }
}
