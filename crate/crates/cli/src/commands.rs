//! The five subcommands. Each returns the process exit code: 0 for success,
//! 3 when a quadrature failed to converge (output is still written and
//! flagged), 4 when the trajectory solver aborted (partial output written).
//! Configuration problems surface as [`CliError`] and exit with 2.

use std::io::Write;

use rayon::prelude::*;

use bbfriction::dynamics::{evolve, SolverConfig};
use bbfriction::forces::{
    force_breakdown, force_comoving, force_lab, heating_rate_lab, resonance_normalization,
};
use bbfriction::kinematics::validate_dipole_conditions;
use bbfriction::resonance::{acceleration_threshold, acceleration_window, fig2_curves};
use bbfriction::{BathSpec64, KinematicState64, ParticleSpec64};

use crate::config::{CoreSetup, RunConfig, SweepParam, SweepSpec};
use crate::output::CsvWriter;
use crate::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;

fn dipole_warnings(setup: &CoreSetup) -> Vec<String> {
    validate_dipole_conditions(&setup.particle, &setup.bath, &setup.state, &setup.consts)
        .iter()
        .map(|w| w.to_string())
        .collect()
}

/// Single-point evaluation of `F_x`, `Q̇` and both `F′_x` routes.
pub fn cmd_force<W: Write>(
    config_text: &str,
    quad_rtol: Option<f64>,
    sink: W,
) -> Result<u8, CliError> {
    let config = RunConfig::parse(config_text)?;
    let setup = config.to_core(quad_rtol)?;
    let warnings = dipole_warnings(&setup);
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let breakdown = force_breakdown(
        &setup.state,
        &setup.particle,
        &setup.bath,
        &setup.consts,
        &setup.quadrature,
    )?;
    let all_converged =
        breakdown.f_x.converged && breakdown.q_dot.converged && breakdown.f_prime_direct.converged;

    let mut out = CsvWriter::new(sink, config.output.precision_digits);
    out.provenance("force", config_text, &warnings)?;
    if !all_converged {
        out.comment("warning: quadrature did not converge; values are best estimates")?;
    }
    out.header(&[
        "beta",
        "omega",
        "theta",
        "T1",
        "T2",
        "F_x",
        "Q_dot",
        "F_prime_lab_combo",
        "F_prime_direct",
        "err_est",
    ])?;
    let err_est = breakdown.f_prime_combo.error + breakdown.f_prime_direct.error;
    out.row(&[
        out.num(setup.state.beta()),
        out.num(setup.state.omega()),
        out.num(setup.state.theta()),
        out.num(setup.particle.t1()),
        out.num(setup.bath.t2()),
        out.num(breakdown.f_x.value),
        out.num(breakdown.q_dot.value),
        out.num(breakdown.f_prime_combo.value),
        out.num(breakdown.f_prime_direct.value),
        out.num(err_est),
    ])?;
    out.flush()?;
    Ok(if all_converged { EXIT_OK } else { EXIT_NUMERIC })
}

/// Rotation-ratio threshold for acceleration at one `(χ, θ)`, plus the
/// reduced-temperature window where a threshold exists at all.
pub fn cmd_threshold<W: Write>(chi: f64, theta: f64, sink: W) -> Result<u8, CliError> {
    if !(chi.is_finite() && chi > 0.0) {
        return Err(CliError::Config(format!("chi must be > 0, got {chi}")));
    }
    if !theta.is_finite() {
        return Err(CliError::Config("theta must be finite".into()));
    }
    let u_star = acceleration_threshold(chi, theta);
    let (lo, hi) = acceleration_window::<f64>();

    let mut out = CsvWriter::new(sink, None);
    out.provenance("threshold", &format!("chi={chi} theta={theta}"), &[])?;
    out.header(&["chi", "theta", "u_star", "chi_window_lo", "chi_window_hi"])?;
    out.row(&[
        out.num(chi),
        out.num(theta),
        u_star.map(|u| out.num(u)).unwrap_or_default(),
        out.num(lo),
        out.num(hi),
    ])?;
    out.flush()?;
    Ok(EXIT_OK)
}

/// Normalized-force curve family `f(u)` for several `χ` at `θ = 0`,
/// chi-major and u-minor.
pub fn cmd_fig2<W: Write>(
    u_max: f64,
    n_points: usize,
    chi_list: &[f64],
    sink: W,
) -> Result<u8, CliError> {
    if n_points < 2 {
        return Err(CliError::Config("n_points must be >= 2".into()));
    }
    if !(u_max.is_finite() && u_max > 0.0) {
        return Err(CliError::Config(format!("u_max must be > 0, got {u_max}")));
    }
    for &chi in chi_list {
        if !(chi.is_finite() && chi > 0.0) {
            return Err(CliError::Config(format!(
                "chi values must be > 0, got {chi}"
            )));
        }
    }
    let u_grid: Vec<f64> = (0..n_points)
        .map(|i| u_max * i as f64 / (n_points - 1) as f64)
        .collect();
    let rows = fig2_curves(&u_grid, chi_list, 0.0);

    let mut out = CsvWriter::new(sink, None);
    out.provenance(
        "fig2",
        &format!("u_max={u_max} n_points={n_points} chi={chi_list:?}"),
        &[],
    )?;
    out.header(&["chi", "u", "f_quadratic", "f_exact"])?;
    for r in rows {
        out.row(&[
            out.num(r.chi),
            out.num(r.u),
            out.num(r.f_quadratic),
            out.num(r.f_exact),
        ])?;
    }
    out.flush()?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepQuantity {
    FPrime,
    FX,
    QDot,
    FNormalized,
}

impl SweepQuantity {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "F_prime" => SweepQuantity::FPrime,
            "F_x" => SweepQuantity::FX,
            "Q_dot" => SweepQuantity::QDot,
            "f_normalized" => SweepQuantity::FNormalized,
            other => {
                return Err(CliError::Config(format!(
                    "unknown quantity `{other}` (expected F_prime, F_x, Q_dot or f_normalized)"
                )))
            }
        })
    }

    fn column(&self) -> &'static str {
        match self {
            SweepQuantity::FPrime => "F_prime",
            SweepQuantity::FX => "F_x",
            SweepQuantity::QDot => "Q_dot",
            SweepQuantity::FNormalized => "f_normalized",
        }
    }
}

/// Validates an axis range against the parameter's domain up front, so a
/// sweep can only fail per-point for numerical reasons.
fn validate_axis_domain(spec: &SweepSpec) -> Result<(), CliError> {
    for axis in &spec.axes {
        let bad = |what: &str| {
            Err(CliError::Config(format!(
                "axis {}: {what}",
                axis.param.name()
            )))
        };
        match axis.param {
            SweepParam::Beta => {
                if axis.min < 0.0 || axis.max >= 1.0 {
                    return bad("beta must stay in [0, 1)");
                }
            }
            SweepParam::Omega | SweepParam::U => {
                if axis.min < 0.0 {
                    return bad("rotation must be >= 0");
                }
            }
            SweepParam::Theta => {
                if axis.min < 0.0 || axis.max > std::f64::consts::PI {
                    return bad("theta must stay in [0, pi]");
                }
            }
            SweepParam::T1 | SweepParam::T2 | SweepParam::Chi => {
                if axis.min <= 0.0 {
                    return bad("temperatures and chi must be > 0");
                }
            }
        }
    }
    Ok(())
}

/// Cartesian-grid sweep of one quantity. Points are evaluated in parallel;
/// rows are emitted in grid order with an error flag column, and any
/// flagged point turns the exit code to 3.
pub fn cmd_sweep<W: Write>(
    config_text: &str,
    axis_specs: &[String],
    quantity: &str,
    quad_rtol: Option<f64>,
    sink: W,
) -> Result<u8, CliError> {
    let config = RunConfig::parse(config_text)?;
    let setup = config.to_core(quad_rtol)?;
    let spec = SweepSpec::parse(axis_specs)?;
    validate_axis_domain(&spec)?;
    let quantity = SweepQuantity::parse(quantity)?;
    if !setup.particle.model().is_smooth() {
        return Err(CliError::Config(
            "sweep quantities require a `lorentz` model (delta models are closed-form only)".into(),
        ));
    }
    let omega0 = setup
        .particle
        .model()
        .resonance_frequency()
        .expect("lorentz model has a resonance");

    if quantity == SweepQuantity::FNormalized {
        let beta_axis = spec.axes.iter().find(|a| a.param == SweepParam::Beta);
        let zero_possible = match beta_axis {
            Some(a) => a.min <= 0.0,
            None => setup.state.beta() == 0.0,
        };
        if zero_possible {
            return Err(CliError::Config(
                "f_normalized needs beta > 0 (the normalization is proportional to the speed)"
                    .into(),
            ));
        }
    }

    let warnings = dipole_warnings(&setup);
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    struct PointResult {
        coords: Vec<f64>,
        value: f64,
        err: f64,
        failed: bool,
    }

    let evaluate = |index: usize| -> Result<PointResult, CliError> {
        let coords = spec.coords(index);
        let mut beta = setup.state.beta();
        let mut omega = setup.state.omega();
        let mut theta = setup.state.theta();
        let mut t1 = setup.particle.t1();
        let mut t2 = setup.bath.t2();
        for (axis, &value) in spec.axes.iter().zip(&coords) {
            match axis.param {
                SweepParam::Beta => beta = value,
                SweepParam::Omega => omega = value,
                SweepParam::Theta => theta = value,
                SweepParam::T1 => t1 = value,
                SweepParam::T2 => t2 = value,
                // χ = ħω₀/2k_BT₂ fixes the bath temperature.
                SweepParam::Chi => {
                    t2 = setup.consts.hbar() * omega0 / (2.0 * value * setup.consts.k_b())
                }
                SweepParam::U => omega = value * omega0,
            }
        }
        let state = KinematicState64::new(beta, omega, theta)?;
        let bath = BathSpec64::new(t2, &setup.consts)?;
        let particle = ParticleSpec64::new(
            setup.particle.mass(),
            setup.particle.radius(),
            t1,
            *setup.particle.model(),
        )?;
        let est = match quantity {
            SweepQuantity::FPrime | SweepQuantity::FNormalized => {
                force_comoving(&state, &particle, &bath, &setup.consts, &setup.quadrature)?
            }
            SweepQuantity::FX => {
                force_lab(&state, &particle, &bath, &setup.consts, &setup.quadrature)?
            }
            SweepQuantity::QDot => {
                heating_rate_lab(&state, &particle, &bath, &setup.consts, &setup.quadrature)?
            }
        };
        let (value, err) = if quantity == SweepQuantity::FNormalized {
            let f0 =
                resonance_normalization(particle.model(), beta * setup.consts.c(), &setup.consts)
                    .expect("lorentz model has a resonance frequency");
            (est.value / f0, est.error / f0.abs())
        } else {
            (est.value, est.error)
        };
        Ok(PointResult {
            coords,
            value,
            err,
            failed: !est.converged,
        })
    };

    let points: Vec<Result<PointResult, CliError>> =
        (0..spec.grid_len()).into_par_iter().map(evaluate).collect();

    let mut out = CsvWriter::new(sink, config.output.precision_digits);
    out.provenance("sweep", config_text, &warnings)?;
    let mut columns: Vec<&str> = spec.axes.iter().map(|a| a.param.name()).collect();
    columns.push(quantity.column());
    columns.push("err_est");
    columns.push("error_flag");
    out.header(&columns)?;

    let mut any_failed = false;
    for point in points {
        let point = point?;
        any_failed |= point.failed;
        let mut fields: Vec<String> = point.coords.iter().map(|&c| out.num(c)).collect();
        fields.push(out.num(point.value));
        fields.push(out.num(point.err));
        fields.push(if point.failed { "1" } else { "0" }.to_string());
        out.row(&fields)?;
    }
    out.flush()?;
    Ok(if any_failed { EXIT_NUMERIC } else { EXIT_OK })
}

/// Integrates the deceleration equation and emits the sampled trajectory.
pub fn cmd_evolve<W: Write>(
    config_text: &str,
    quad_rtol: Option<f64>,
    sink: W,
) -> Result<u8, CliError> {
    let config = RunConfig::parse(config_text)?;
    let setup = config.to_core(quad_rtol)?;
    let solver_section = config.solver.as_ref().ok_or_else(|| {
        CliError::Config("evolve requires a [solver] section with t_span_s".into())
    })?;
    if !(solver_section.t_span_s.is_finite() && solver_section.t_span_s > 0.0) {
        return Err(CliError::Config("t_span_s must be > 0".into()));
    }
    let solver = SolverConfig {
        rel_tol: solver_section.rel_tol,
        abs_tol: solver_section.abs_tol,
        initial_step: solver_section.initial_step_s,
        max_steps: solver_section.max_steps,
        sample_interval: solver_section.sample_interval_s,
    };
    let warnings = dipole_warnings(&setup);
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let result = evolve(
        &setup.state,
        &setup.particle,
        &setup.bath,
        (0.0, solver_section.t_span_s),
        &setup.consts,
        &solver,
        &setup.quadrature,
    );

    let mut out = CsvWriter::new(sink, config.output.precision_digits);
    out.provenance("evolve", config_text, &warnings)?;
    let (trajectory, aborted) = match result {
        Ok(t) => (t, None),
        Err(abort) => {
            let reason = abort.reason.to_string();
            (abort.partial, Some(reason))
        }
    };
    if let Some(reason) = &aborted {
        out.comment(&format!("aborted: {reason}; trajectory is partial"))?;
        eprintln!("error: {reason}");
    }
    out.header(&["t", "beta", "F_prime_x", "Q_dot"])?;
    for s in &trajectory.samples {
        out.row(&[
            out.num(s.t),
            out.num(s.beta),
            out.num(s.f_prime_x),
            out.num(s.q_dot),
        ])?;
    }
    out.flush()?;
    Ok(if aborted.is_some() {
        EXIT_SOLVER
    } else {
        EXIT_OK
    })
}
