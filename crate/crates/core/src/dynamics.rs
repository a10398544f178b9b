//! Time integration of the relativistic deceleration equation
//! `mc/(1−β²)^{3/2} · dβ/dt = F′_x(β)`.
//!
//! The rotation rate, tilt angle and both temperatures are held constant
//! along a trajectory: no torque or heat-capacity law is modeled, so `Ω`
//! and `T₁` enter only as fixed parameters, and the heating rate is
//! recorded per sample as a diagnostic.
//!
//! The stepper is the embedded Dormand–Prince 5(4) pair with proportional
//! step control. `β` is never clamped: a step that would leave `[0, 1)` is
//! rejected and retried smaller, so the invariant is maintained by
//! accuracy alone.

use thiserror::Error;

use crate::constants::PhysicalConstants;
use crate::error::{Error as CoreError, Result as CoreResult};
use crate::forces::force_comoving;
use crate::kinematics::{BathSpec, KinematicState, ParticleSpec};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Real;

/// Step-control settings for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<R: Real> {
    /// Relative tolerance of the embedded error control.
    pub rel_tol: R,
    /// Absolute tolerance of the embedded error control (in β).
    pub abs_tol: R,
    /// Initial step size in seconds; `None` picks one from the initial
    /// slope.
    pub initial_step: Option<R>,
    /// Budget of accepted plus rejected steps.
    pub max_steps: usize,
    /// Sampling interval in seconds; `None` records every accepted step.
    pub sample_interval: Option<R>,
}

impl<R: Real> Default for SolverConfig<R> {
    fn default() -> Self {
        Self {
            rel_tol: R::lit(1e-6),
            abs_tol: R::lit(1e-12),
            initial_step: None,
            max_steps: 100_000,
            sample_interval: None,
        }
    }
}

/// One recorded trajectory point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<R: Real> {
    /// Time (s).
    pub t: R,
    /// Velocity in units of c.
    pub beta: R,
    /// Co-moving tangential force at this state (N).
    pub f_prime_x: R,
    /// Lab-frame heating rate at this state (W), recorded as a diagnostic.
    pub q_dot: R,
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverStats {
    /// Accepted steps.
    pub steps_accepted: usize,
    /// Rejected trial steps.
    pub steps_rejected: usize,
    /// Force evaluations performed by the stepper.
    pub rhs_evaluations: usize,
}

/// Sampled `β(t)` with per-sample force and heating diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<R: Real> {
    /// Samples in strictly increasing time order.
    pub samples: Vec<TrajectorySample<R>>,
    /// Step-control counters.
    pub stats: SolverStats,
}

/// Why an integration stopped early.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbortReason<R: Real> {
    /// The controller drove the step size below representable resolution.
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow {
        /// Time at which the controller gave up.
        t: R,
    },
    /// The accepted-plus-rejected step budget ran out.
    #[error("step budget exhausted at t = {t}")]
    MaxStepsExceeded {
        /// Time reached when the budget ran out.
        t: R,
    },
    /// A force evaluation failed or did not converge.
    #[error("force evaluation failed at t = {t}: {source}")]
    RhsError {
        /// Time of the failing evaluation.
        t: R,
        /// The underlying evaluation error.
        source: CoreError,
    },
}

/// Early termination carrying the partial trajectory integrated so far.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("integration aborted: {reason}")]
pub struct EvolveAbort<R: Real> {
    /// What went wrong.
    pub reason: AbortReason<R>,
    /// Everything sampled before the abort.
    pub partial: Trajectory<R>,
}

/// Right-hand side of the deceleration equation,
/// `dβ/dt = (1−β²)^{3/2} · F′_x(β) / (m c)`.
///
/// Fails if the force quadrature does not converge, which aborts a running
/// integration with the partial trajectory.
pub fn deceleration_rhs<R: Real>(
    beta: R,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    omega_rot: R,
    theta: R,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> CoreResult<R> {
    let state = KinematicState::new(beta, omega_rot, theta)?;
    let force = force_comoving(&state, particle, bath, consts, cfg)?;
    if !force.converged {
        return Err(CoreError::Unconverged {
            context: "co-moving force in deceleration right-hand side",
        });
    }
    Ok(rhs_from_force(
        beta,
        force.value,
        particle.mass(),
        consts.c(),
    ))
}

fn rhs_from_force<R: Real>(beta: R, force: R, mass: R, c: R) -> R {
    let one_minus = (R::one() - beta) * (R::one() + beta);
    one_minus * one_minus.sqrt() * force / (mass * c)
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `β(t)` over `t_span`, holding `Ω`, `θ`, `T₁`, `T₂` fixed.
///
/// Samples are recorded at `t₀`, at every multiple of the sample interval,
/// and at the final time (or at each accepted step when no interval is
/// configured). The run is deterministic: identical inputs produce
/// bit-identical trajectories.
pub fn evolve<R: Real>(
    state0: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    t_span: (R, R),
    consts: &PhysicalConstants<R>,
    solver: &SolverConfig<R>,
    quad: &QuadratureConfig<R>,
) -> Result<Trajectory<R>, Box<EvolveAbort<R>>> {
    let (t0, t1) = t_span;
    let mut trajectory = Trajectory {
        samples: Vec::new(),
        stats: SolverStats::default(),
    };
    let abort = |reason, partial| Err(Box::new(EvolveAbort { reason, partial }));

    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return abort(
            AbortReason::RhsError {
                t: t0,
                source: CoreError::invalid("t_span", format!("need t0 < t1, got [{t0}, {t1}]")),
            },
            trajectory,
        );
    }
    let positive = |v: R| v.is_finite() && v > R::zero();
    let solver_ok = positive(solver.rel_tol)
        && positive(solver.abs_tol)
        && solver.max_steps >= 1
        && solver.initial_step.map_or(true, positive)
        && solver.sample_interval.map_or(true, positive);
    if !solver_ok {
        return abort(
            AbortReason::RhsError {
                t: t0,
                source: CoreError::invalid(
                    "solver",
                    "tolerances, steps and intervals must be positive",
                ),
            },
            trajectory,
        );
    }

    let omega_rot = state0.omega();
    let theta = state0.theta();
    let mass = particle.mass();
    let c = consts.c();

    // Stage evaluations may transiently leave [0, 1); the raw state keeps
    // the formulas smooth there and the controller rejects such steps.
    let mut rhs_calls = 0usize;
    let mut rhs = |beta: R| -> CoreResult<R> {
        rhs_calls += 1;
        let state = KinematicState::raw(beta, omega_rot, theta);
        let force = force_comoving(&state, particle, bath, consts, quad)?;
        if !force.converged {
            return Err(CoreError::Unconverged {
                context: "co-moving force in deceleration right-hand side",
            });
        }
        Ok(rhs_from_force(beta, force.value, mass, c))
    };

    let mut t = t0;
    let mut beta = state0.beta();
    let mut k1 = match rhs(beta) {
        Ok(v) => v,
        Err(source) => {
            trajectory.stats.rhs_evaluations = rhs_calls;
            return abort(AbortReason::RhsError { t, source }, trajectory);
        }
    };

    // Sampling bookkeeping.
    let span = t1 - t0;
    let time_eps = span * R::epsilon() * R::lit(8.0);
    let mut sample_index: usize = 1;
    let next_sample = |index: usize, interval: Option<R>| -> R {
        match interval {
            Some(dt) => t0 + dt * R::lit(index as f64),
            None => t1, // every accepted step is recorded anyway
        }
    };
    let record = |traj: &mut Trajectory<R>, t: R, beta: R, slope: R| {
        let one_minus = (R::one() - beta) * (R::one() + beta);
        let f_prime = slope * mass * c / (one_minus * one_minus.sqrt());
        let q_dot = KinematicState::new(beta, omega_rot, theta)
            .ok()
            .and_then(|s| crate::forces::heating_rate_lab(&s, particle, bath, consts, quad).ok())
            .map(|e| e.value)
            .unwrap_or(R::nan());
        traj.samples.push(TrajectorySample {
            t,
            beta,
            f_prime_x: f_prime,
            q_dot,
        });
    };
    record(&mut trajectory, t, beta, k1);

    // Initial step from the initial slope unless configured.
    let mut h = solver.initial_step.unwrap_or_else(|| {
        let coarse = span * R::lit(0.02);
        if k1 == R::zero() {
            coarse
        } else {
            coarse.min(R::lit(0.05) * beta.abs().max(R::lit(1e-3)) / k1.abs())
        }
    });
    let min_step = span * R::epsilon() * R::lit(64.0);
    let safety = R::lit(0.9);

    while t1 - t > time_eps {
        if trajectory.stats.steps_accepted + trajectory.stats.steps_rejected >= solver.max_steps {
            trajectory.stats.rhs_evaluations = rhs_calls;
            return abort(AbortReason::MaxStepsExceeded { t }, trajectory);
        }
        let target = next_sample(sample_index, solver.sample_interval).min(t1);
        let h_try = h.min(target - t).max(min_step);
        if h_try < min_step || !h_try.is_finite() {
            trajectory.stats.rhs_evaluations = rhs_calls;
            return abort(AbortReason::StepSizeUnderflow { t }, trajectory);
        }

        // Dormand–Prince stages; k7 doubles as the next step's k1 (FSAL).
        let mut k = [
            k1,
            R::zero(),
            R::zero(),
            R::zero(),
            R::zero(),
            R::zero(),
            R::zero(),
        ];
        let mut failed = None;
        for stage in 0..6 {
            let mut y = beta;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                y = y + h_try * R::lit(A[stage][j]) * *kj;
            }
            match rhs(y) {
                Ok(v) => k[stage + 1] = v,
                Err(source) => {
                    failed = Some(source);
                    break;
                }
            }
        }
        if let Some(source) = failed {
            trajectory.stats.rhs_evaluations = rhs_calls;
            return abort(AbortReason::RhsError { t, source }, trajectory);
        }

        // 5th-order solution is the last stage row; embedded error from E.
        let mut beta_new = beta;
        for (j, kj) in k.iter().enumerate().take(6) {
            beta_new = beta_new + h_try * R::lit(A[5][j]) * *kj;
        }
        let mut err = R::zero();
        for (j, kj) in k.iter().enumerate() {
            err = err + R::lit(E[j]) * *kj;
        }
        err = err * h_try;

        let scale = solver.abs_tol + solver.rel_tol * beta.abs().max(beta_new.abs());
        let err_norm = (err / scale).abs();
        let in_range = beta_new >= R::zero() && beta_new < R::one();

        if err_norm <= R::one() && err_norm.is_finite() && in_range {
            t = if (t + h_try - target).abs() <= time_eps {
                target
            } else {
                t + h_try
            };
            beta = beta_new;
            k1 = k[6];
            trajectory.stats.steps_accepted += 1;

            let at_sample = match solver.sample_interval {
                Some(_) => {
                    (t - target).abs() <= time_eps
                        && t >= next_sample(sample_index, solver.sample_interval) - time_eps
                }
                None => true,
            };
            if at_sample || t1 - t <= time_eps {
                record(&mut trajectory, t, beta, k1);
            }
            while solver.sample_interval.is_some()
                && next_sample(sample_index, solver.sample_interval) <= t + time_eps
            {
                sample_index += 1;
            }

            let grow = if err_norm == R::zero() {
                R::lit(5.0)
            } else {
                (safety * err_norm.powf(R::lit(-0.2))).min(R::lit(5.0))
            };
            h = (h_try * grow.max(R::lit(0.2))).min(span);
        } else {
            trajectory.stats.steps_rejected += 1;
            let shrink = if err_norm.is_finite() && err_norm > R::zero() {
                (safety * err_norm.powf(R::lit(-0.2)))
                    .max(R::lit(0.2))
                    .min(R::lit(0.9))
            } else {
                R::lit(0.5)
            };
            h = h_try * shrink;
        }
    }

    trajectory.stats.rhs_evaluations = rhs_calls;
    Ok(trajectory)
}
