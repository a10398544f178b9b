//! Radiative force and heating functionals.
//!
//! Lab frame (the rest frame of the radiation): the tangential force `F_x`
//! and the heating rate `Q̇` are double integrals over frequency `ω` and the
//! direction cosine `μ`, weighted by the angular factors of
//! [`weight_lab`] and thermally by `coth` differences between the bath
//! temperature `T₂` (at the lab frequency) and the particle temperature
//! `T₁` (at the Doppler-shifted, rotation-shifted frequency).
//!
//! Co-moving frame: the tangential force `F′_x` that actually governs the
//! deceleration. It is computed two independent ways — through the
//! frame-transform identity `F′_x = F_x − βγ²Q̇/c`, and directly from its
//! own double integral
//!
//! ```text
//! F′_x = ħ/(4πc⁴) ∫_{−∞}^{∞} dω ω⁴ ∫_{−1}^{1} dμ μ coth(ħγω(1+βμ)/2k_BT₂)
//!         · [A(μ,θ)·α″(ω) + B(μ,θ)·α″(ω+Ω)].
//! ```
//!
//! The direct form is *not* integrated as written: at large `|ω|` the raw
//! `coth` saturates to `±1` and the integrand survives only through
//! cancellation after the exact `μ` integral. Instead it is rewritten in
//! three exact steps:
//!
//! 1. `coth(y) = 1 + 2/(e^{2y} − 1)`: the "1" part integrates to zero
//!    because `A`, `B` are even in `μ` while the measure `μ dμ` is odd,
//!    leaving only the thermal occupation `n`.
//! 2. `ω → −ω` on the negative half-axis: `coth` (hence the inner
//!    `μ`-integral) is odd under it, `ω⁴` is even, and `α″` is odd, so the
//!    `A` term doubles while the `B` term picks up
//!    `α″(ω+Ω) − α″(−ω+Ω) = α″(ω+Ω) + α″(ω−Ω)`.
//! 3. What remains is
//!
//! ```text
//! F′_x = ħ/(4πc⁴) ∫₀^∞ dω ω⁴ { 2α″(ω)·K_A(ω) + [α″(ω+Ω) + α″(ω−Ω)]·K_B(ω) }
//! K_X(ω) = 2 ∫_{−1}^{1} dμ μ·X(μ,θ) / (e^{ħγω(1+βμ)/k_B T₂} − 1)
//! ```
//!
//! whose integrand carries an explicit `e^{−ħγω(1−β)/k_B T₂}` envelope
//! instead of a cancellation-limited tail. The unfolded evaluation is kept
//! as a regression reference in the test suite.
//!
//! The nonrelativistic limit and its zero-rotation reduction are provided
//! as separate evaluators for cross-checks against the closed forms of
//! [`crate::resonance`].

use std::cell::Cell;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kinematics::{BathSpec, KinematicState, ParticleSpec};
use crate::polarizability::PolarizabilityModel;
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadResult, QuadratureConfig};
use crate::scalar::Real;
use crate::special::bose;

/// A computed quantity with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<R: Real> {
    /// The value, in the unit of the quantity.
    pub value: R,
    /// Estimated absolute error (quadrature plus truncation).
    pub error: R,
    /// Whether every quadrature involved met its tolerance.
    pub converged: bool,
}

/// The full set of force/heating outputs for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBreakdown<R: Real> {
    /// Lab-frame tangential force `F_x` (N).
    pub f_x: Estimate<R>,
    /// Lab-frame heating rate `Q̇` (W).
    pub q_dot: Estimate<R>,
    /// Co-moving force from the frame-transform identity `F_x − βγ²Q̇/c`.
    pub f_prime_combo: Estimate<R>,
    /// Co-moving force from the direct folded integral.
    pub f_prime_direct: Estimate<R>,
    /// `F′_x` normalized by `ħVα(0)ω₀⁵/3c⁵`; present when the model has a
    /// resonance frequency and the particle is moving (the normalization
    /// vanishes with `V`).
    pub normalized: Option<R>,
}

/// Angular weights of the lab-frame integrands.
///
/// `W1` multiplies the unshifted absorption term, `W2` the
/// rotation-shifted one:
///
/// ```text
/// W1 = (1−β²)(1−μ²)cos²θ + [(1+β²)(1+μ²) + 4βμ]·sin²θ/2
/// W2 = (1−β²)(1−μ²)sin²θ + [(1+β²)(1+μ²) + 4βμ]·(1+cos²θ)/2
/// ```
///
/// Their sum is independent of `θ`. The `4βμ` cross term breaks `μ` parity
/// for `β > 0`, which is why the lab integrals cannot be folded.
pub fn weight_lab<R: Real>(beta: R, mu: R, theta: R) -> (R, R) {
    let one = R::one();
    let half = R::lit(0.5);
    let cos2 = theta.cos() * theta.cos();
    let sin2 = theta.sin() * theta.sin();
    let iso = (one - beta * beta) * (one - mu * mu);
    let skew = (one + beta * beta) * (one + mu * mu) + R::lit(4.0) * beta * mu;
    let w1 = iso * cos2 + skew * sin2 * half;
    let w2 = iso * sin2 + skew * (one + cos2) * half;
    (w1, w2)
}

/// Angular weights of the co-moving integrand, both even in `μ`:
///
/// ```text
/// A = (1−μ²)cos²θ + 0.5(1+μ²)sin²θ
/// B = (1−μ²)sin²θ + 0.5(1+μ²)(1+cos²θ)
/// ```
///
/// `A + B = 2` identically, which removes the `θ` dependence whenever both
/// weights multiply the same `α″` (i.e. at zero rotation).
pub fn weight_comoving<R: Real>(mu: R, theta: R) -> (R, R) {
    let one = R::one();
    let half = R::lit(0.5);
    let cos2 = theta.cos() * theta.cos();
    let sin2 = theta.sin() * theta.sin();
    let a = (one - mu * mu) * cos2 + half * (one + mu * mu) * sin2;
    let b = (one - mu * mu) * sin2 + half * (one + mu * mu) * (one + cos2);
    (a, b)
}

/// Selects one of the co-moving angular weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComovingWeight {
    /// The weight multiplying the unshifted `α″(ω)`.
    A,
    /// The weight multiplying the rotation-shifted `α″(ω ± Ω)`.
    B,
}

fn comoving_weight_value<R: Real>(kind: ComovingWeight, mu: R, theta: R) -> R {
    let (a, b) = weight_comoving(mu, theta);
    match kind {
        ComovingWeight::A => a,
        ComovingWeight::B => b,
    }
}

/// Thermal kernel of the folded co-moving integral:
/// `K_X(ω) = 2∫_{−1}^{1} μ·X(μ,θ)/(e^{ħγω(1+βμ)/k_BT₂} − 1) dμ`.
///
/// Negative for `β > 0, ω > 0` (the occupation weights receding directions
/// more), zero at `β = 0` by parity, and odd under `ω → −ω` (negative `ω`
/// is accepted exactly so that oddness can be probed diagnostically).
pub fn kernel_k<R: Real>(
    kind: ComovingWeight,
    omega: R,
    beta: R,
    theta: R,
    t2: R,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<QuadResult<R>> {
    if !(beta.is_finite() && beta >= R::zero() && beta < R::one()) {
        return Err(Error::invalid(
            "beta",
            format!("must be in [0, 1), got {beta}"),
        ));
    }
    if !(t2.is_finite() && t2 > R::zero()) {
        return Err(Error::invalid("t2", format!("must be > 0, got {t2}")));
    }
    if !(omega.is_finite() && omega != R::zero()) {
        return Err(Error::invalid(
            "omega",
            format!("must be nonzero, got {omega}"),
        ));
    }
    let gamma = ((R::one() - beta) * (R::one() + beta)).sqrt().recip();
    kernel_k_wt(
        kind,
        omega,
        gamma,
        beta,
        theta,
        consts.thermal_frequency(t2),
        cfg,
    )
}

fn kernel_k_wt<R: Real>(
    kind: ComovingWeight,
    omega: R,
    gamma: R,
    beta: R,
    theta: R,
    w_t2: R,
    cfg: &QuadratureConfig<R>,
) -> Result<QuadResult<R>> {
    let doppler = gamma * omega / w_t2;
    let mut r = integrate_finite(
        |mu: R| {
            mu * comoving_weight_value(kind, mu, theta) * bose(doppler * (R::one() + beta * mu))
        },
        -R::one(),
        R::one(),
        &cfg.bare(),
    )?;
    r.value = r.value * R::lit(2.0);
    r.error_estimate = r.error_estimate * R::lit(2.0);
    Ok(r)
}

/// Inner-quadrature tolerances: three orders tighter than the outer target
/// so inner noise stays invisible even when the outer integral is strongly
/// cancellation-dominated (near thermal equilibrium the lab functionals
/// integrate small differences of large braces). The subdivision budget is
/// capped: deep in the exponential tails the thermal braces are roundoff
/// noise and no budget can polish them, so the audit weighs their reported
/// error against the outer tolerance instead.
fn inner_cfg<R: Real>(cfg: &QuadratureConfig<R>) -> QuadratureConfig<R> {
    QuadratureConfig {
        rel_tol: (cfg.rel_tol * R::lit(1e-3)).max(R::lit(5e-14)),
        abs_tol: R::zero(),
        max_subdivisions: cfg.max_subdivisions.min(400),
        breakpoints: Vec::new(),
    }
}

/// Tracks the inner integrals performed inside an outer integrand closure:
/// whether they all converged, and how much absolute error they injected
/// into the outer integrand values. Averaged over the evaluations and
/// multiplied by the integration width this estimates the inner-noise
/// contribution to the outer result.
struct InnerAudit<R: Real> {
    all_converged: Cell<bool>,
    noise_density_sum: Cell<R>,
    evaluations: Cell<usize>,
}

impl<R: Real> InnerAudit<R> {
    fn new() -> Self {
        Self {
            all_converged: Cell::new(true),
            noise_density_sum: Cell::new(R::zero()),
            evaluations: Cell::new(0),
        }
    }

    /// Records one inner result whose error enters the outer integrand
    /// scaled by `weight` (the factor the inner value is multiplied by).
    fn record(&self, r: &QuadResult<R>, weight: R) {
        if !r.converged {
            self.all_converged.set(false);
        }
        self.noise_density_sum
            .set(self.noise_density_sum.get() + weight.abs() * r.error_estimate);
        self.evaluations.set(self.evaluations.get() + 1);
    }

    /// Estimated integral of the injected noise over a width.
    fn noise(&self, width: R) -> R {
        let n = self.evaluations.get();
        if n == 0 {
            R::zero()
        } else {
            self.noise_density_sum.get() / R::lit(n as f64) * width
        }
    }
}

/// Direct co-moving tangential force `F′_x` from the folded integral.
///
/// Independent of the particle temperature by construction; strictly zero
/// at `β = 0`. Delta-resonance models are rejected — their co-moving force
/// lives in [`crate::resonance`].
pub fn force_comoving<R: Real>(
    state: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<Estimate<R>> {
    let model = particle.model();
    if !model.is_smooth() {
        return Err(Error::DeltaNotPointwise);
    }
    let (beta, gamma, theta, omega_rot) =
        (state.beta(), state.gamma(), state.theta(), state.omega());
    let w_t2 = consts.thermal_frequency(bath.t2());

    let audit = InnerAudit::new();
    let icfg = inner_cfg(cfg);
    let integrand = |omega: R| {
        if omega <= R::zero() {
            return R::zero();
        }
        let ka = kernel_k_wt(ComovingWeight::A, omega, gamma, beta, theta, w_t2, &icfg)
            .expect("kernel bounds are fixed");
        let kb = kernel_k_wt(ComovingWeight::B, omega, gamma, beta, theta, w_t2, &icfg)
            .expect("kernel bounds are fixed");
        let a_imag = R::lit(2.0) * model.alpha_imag(omega).expect("smooth model");
        let b_imag = model.alpha_imag(omega + omega_rot).expect("smooth model")
            + model.alpha_imag(omega - omega_rot).expect("smooth model");
        let w4 = omega.powi(4);
        audit.record(&ka, w4 * a_imag);
        audit.record(&kb, w4 * b_imag);
        w4 * (a_imag * ka.value + b_imag * kb.value)
    };

    let mut outer_cfg = cfg.clone();
    outer_cfg
        .breakpoints
        .extend(resonance_breakpoints(model, omega_rot));
    let decay = gamma * (R::one() - beta) / w_t2;
    let raw = integrate_semi_infinite(integrand, decay, &outer_cfg)?;

    // Effective support of the integrand, for the inner-noise bound.
    let structured = outer_cfg
        .breakpoints
        .iter()
        .copied()
        .fold(R::zero(), R::max);
    let width = R::lit(20.0) / decay + R::lit(2.0) * structured;
    let pref = consts.hbar() / (R::lit(4.0) * R::PI() * consts.c().powi(4));
    Ok(finish_estimate(pref, raw, &audit, width, cfg))
}

/// Lab-frame tangential force `F_x` from the two-sided double integral.
pub fn force_lab<R: Real>(
    state: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<Estimate<R>> {
    let gamma = state.gamma();
    let pref = -consts.hbar() * gamma / (R::lit(4.0) * R::PI() * consts.c().powi(4));
    lab_double_integral(state, particle, bath, consts, cfg, pref, |mu, _beta| mu)
}

/// Lab-frame heating rate `Q̇`: the same thermal braces as the force, with
/// outer factor `1 + βμ` instead of `μ` and one less power of `c`.
pub fn heating_rate_lab<R: Real>(
    state: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<Estimate<R>> {
    let gamma = state.gamma();
    let pref = consts.hbar() * gamma / (R::lit(4.0) * R::PI() * consts.c().powi(3));
    lab_double_integral(state, particle, bath, consts, cfg, pref, |mu, beta| {
        R::one() + beta * mu
    })
}

/// Co-moving force assembled through `F′_x = F_x − βγ²·Q̇/c`; the error
/// estimates of both inputs combine additively.
pub fn force_comoving_from_lab<R: Real>(
    state: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<Estimate<R>> {
    let f_x = force_lab(state, particle, bath, consts, cfg)?;
    let q_dot = heating_rate_lab(state, particle, bath, consts, cfg)?;
    Ok(combine_lab(state, consts, &f_x, &q_dot))
}

fn combine_lab<R: Real>(
    state: &KinematicState<R>,
    consts: &PhysicalConstants<R>,
    f_x: &Estimate<R>,
    q_dot: &Estimate<R>,
) -> Estimate<R> {
    let factor = state.beta() * state.gamma() * state.gamma() / consts.c();
    Estimate {
        value: f_x.value - factor * q_dot.value,
        error: f_x.error + factor.abs() * q_dot.error,
        converged: f_x.converged && q_dot.converged,
    }
}

/// Nonrelativistic co-moving force for speed `V = βc ≪ c`:
///
/// ```text
/// F′_x = −ħ²V/(30πc⁵k_BT₂) ∫ dω ω⁵/sinh²(ħω/2k_BT₂)
///         · [(1+sin²θ)α″(ω) + (3+cos²θ)α″(ω+Ω)]
/// ```
///
/// evaluated in folded form on `[0, ∞)` with `α″(ω+Ω) + α″(ω−Ω)` carrying
/// the shifted term.
pub fn force_nonrel<R: Real>(
    v: R,
    omega_rot: R,
    theta: R,
    model: &PolarizabilityModel<R>,
    t2: R,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<Estimate<R>> {
    if !model.is_smooth() {
        return Err(Error::DeltaNotPointwise);
    }
    if !(v.is_finite() && v >= R::zero()) {
        return Err(Error::invalid("v", format!("must be >= 0, got {v}")));
    }
    if !(t2.is_finite() && t2 > R::zero()) {
        return Err(Error::invalid("t2", format!("must be > 0, got {t2}")));
    }
    let w_t2 = consts.thermal_frequency(t2);
    let sin2 = theta.sin() * theta.sin();
    let cos2 = theta.cos() * theta.cos();

    let integrand = |omega: R| {
        if omega <= R::zero() {
            return R::zero();
        }
        let s = inv_sinh_sq_half(omega, w_t2);
        let unshifted =
            R::lit(2.0) * (R::one() + sin2) * model.alpha_imag(omega).expect("smooth model");
        let shifted = (R::lit(3.0) + cos2)
            * (model.alpha_imag(omega + omega_rot).expect("smooth model")
                + model.alpha_imag(omega - omega_rot).expect("smooth model"));
        omega.powi(5) * s * (unshifted + shifted)
    };

    let mut outer_cfg = cfg.clone();
    outer_cfg
        .breakpoints
        .extend(resonance_breakpoints(model, omega_rot));
    let raw = integrate_semi_infinite(integrand, w_t2.recip(), &outer_cfg)?;

    let pref = -consts.hbar() * v / (R::lit(30.0) * R::PI() * consts.c().powi(5) * w_t2);
    Ok(Estimate {
        value: pref * raw.value,
        error: pref.abs() * raw.error_estimate,
        converged: raw.converged,
    })
}

/// Zero-rotation nonrelativistic drag:
/// `F′_x = −ħ²V/(3πc⁵k_BT₂) ∫₀^∞ dω ω⁵ α″(ω)/sinh²(ħω/2k_BT₂)`.
///
/// Always ≤ 0 for `V ≥ 0`; the `Ω = 0` case of [`force_nonrel`] reduces to
/// this exactly.
pub fn force_mkrtchian<R: Real>(
    v: R,
    model: &PolarizabilityModel<R>,
    t2: R,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<Estimate<R>> {
    if !model.is_smooth() {
        return Err(Error::DeltaNotPointwise);
    }
    if !(v.is_finite() && v >= R::zero()) {
        return Err(Error::invalid("v", format!("must be >= 0, got {v}")));
    }
    if !(t2.is_finite() && t2 > R::zero()) {
        return Err(Error::invalid("t2", format!("must be > 0, got {t2}")));
    }
    let w_t2 = consts.thermal_frequency(t2);
    let integrand = |omega: R| {
        if omega <= R::zero() {
            return R::zero();
        }
        omega.powi(5)
            * inv_sinh_sq_half(omega, w_t2)
            * model.alpha_imag(omega).expect("smooth model")
    };
    let mut outer_cfg = cfg.clone();
    outer_cfg
        .breakpoints
        .extend(resonance_breakpoints(model, R::zero()));
    let raw = integrate_semi_infinite(integrand, w_t2.recip(), &outer_cfg)?;
    let pref = -consts.hbar() * v / (R::lit(3.0) * R::PI() * consts.c().powi(5) * w_t2);
    Ok(Estimate {
        value: pref * raw.value,
        error: pref.abs() * raw.error_estimate,
        converged: raw.converged,
    })
}

/// The normalization `F₀ = ħVα(0)ω₀⁵/3c⁵` of the resonance closed forms,
/// available whenever the model exposes a resonance frequency.
pub fn resonance_normalization<R: Real>(
    model: &PolarizabilityModel<R>,
    v: R,
    consts: &PhysicalConstants<R>,
) -> Option<R> {
    model.resonance_frequency().map(|w0| {
        consts.hbar() * v * model.static_polarizability() * w0.powi(5)
            / (R::lit(3.0) * consts.c().powi(5))
    })
}

/// Evaluates everything at once: `F_x`, `Q̇`, the identity-combined and the
/// direct `F′_x`, and the normalized force where defined (β > 0 keeps the
/// normalization finite).
pub fn force_breakdown<R: Real>(
    state: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
) -> Result<ForceBreakdown<R>> {
    let f_x = force_lab(state, particle, bath, consts, cfg)?;
    let q_dot = heating_rate_lab(state, particle, bath, consts, cfg)?;
    let f_prime_combo = combine_lab(state, consts, &f_x, &q_dot);
    let f_prime_direct = force_comoving(state, particle, bath, consts, cfg)?;
    let normalized = if state.beta() > R::zero() {
        resonance_normalization(particle.model(), state.beta() * consts.c(), consts)
            .map(|f0| f_prime_direct.value / f0)
    } else {
        None
    };
    Ok(ForceBreakdown {
        f_x,
        q_dot,
        f_prime_combo,
        f_prime_direct,
        normalized,
    })
}

// ---------------------------------------------------------------------------
// Lab-frame internals.
// ---------------------------------------------------------------------------

/// One thermal brace `α″(u)[coth(ħω/2k_BT₂) − coth(ħu/2k_BT₁)]` at a
/// precomputed bath occupation `n₂ = 1/(e^{ħω/k_BT₂} − 1)`.
///
/// Through `coth(y) = 1 + 2/(e^{2y} − 1)` the vacuum parts cancel exactly,
/// leaving `2α″(u)[n₂ − n(u/w₁)]`. That factored form is used wherever the
/// particle occupation is regular; it makes the brace vanish identically in
/// equilibrium (`u = ω`, `T₁ = T₂`). Near the removable point `u → 0` the
/// product `α″(u)·n(u/w₁)` is evaluated jointly through the finite
/// `[α″(u)/u]·w₁·(u/w₁)/(e^{u/w₁} − 1)` instead.
fn thermal_brace<R: Real>(model: &PolarizabilityModel<R>, u: R, bath_occupation: R, w_t1: R) -> R {
    let two = R::lit(2.0);
    let y = u / w_t1;
    if y.abs() > R::lit(1e-4) {
        two * model.alpha_imag(u).expect("smooth model") * (bath_occupation - bose(y))
    } else {
        two * (model.alpha_imag(u).expect("smooth model") * bath_occupation
            - model.alpha_bose_wt(u, w_t1).expect("smooth model"))
    }
}

/// Both lab braces at fixed `(ω, μ)`: the unshifted one at `u₁ = γω(1+βμ)`
/// and the rotation-shifted one at `u₂ = u₁ + Ω`.
///
/// At `ω = 0` the first brace takes its finite limit through the model
/// slope, `b₁ → 2·α″′(0)·(γ(1+βμ)·k_BT₂ − k_BT₁)/ħ`, while `b₂` is returned
/// as zero: its `1/ω` pole is killed by the `ω⁴` measure and the point is
/// always a panel edge, never a quadrature node.
#[allow(clippy::too_many_arguments)]
fn lab_braces<R: Real>(
    model: &PolarizabilityModel<R>,
    omega: R,
    mu: R,
    gamma: R,
    beta: R,
    omega_rot: R,
    w_t1: R,
    w_t2: R,
) -> (R, R) {
    let c1 = gamma * (R::one() + beta * mu);
    if omega == R::zero() {
        let slope = model.slope_at_zero().expect("smooth model");
        return (R::lit(2.0) * slope * (c1 * w_t2 - w_t1), R::zero());
    }
    let u1 = c1 * omega;
    let u2 = u1 + omega_rot;
    let bath_occupation = bose(omega / w_t2);
    (
        thermal_brace(model, u1, bath_occupation, w_t1),
        thermal_brace(model, u2, bath_occupation, w_t1),
    )
}

/// Shared two-sided double integral of the lab-frame functionals; the
/// `outer_weight(μ, β)` factor is `μ` for the force and `1+βμ` for the
/// heating rate.
fn lab_double_integral<R: Real>(
    state: &KinematicState<R>,
    particle: &ParticleSpec<R>,
    bath: &BathSpec<R>,
    consts: &PhysicalConstants<R>,
    cfg: &QuadratureConfig<R>,
    pref: R,
    outer_weight: impl Fn(R, R) -> R,
) -> Result<Estimate<R>> {
    let model = particle.model();
    if !model.is_smooth() {
        return Err(Error::DeltaNotPointwise);
    }
    let (beta, gamma, theta, omega_rot) =
        (state.beta(), state.gamma(), state.theta(), state.omega());
    let w_t1 = consts.thermal_frequency(particle.t1());
    let w_t2 = consts.thermal_frequency(bath.t2());
    let w0 = model
        .resonance_frequency()
        .expect("smooth model has a resonance");

    // The coth differences decay exponentially; the slowest mode (the
    // receding direction μ = −1) sets the cutoff through the 1/(1−β) factor.
    let scale = w_t1.max(w_t2).max(w0).max(omega_rot);
    let omega_max = R::lit(20.0) / (R::one() - beta) * scale;

    let audit = InnerAudit::new();
    let icfg = inner_cfg(cfg);
    let outer_integrand = |omega: R| {
        if omega == R::zero() {
            return R::zero();
        }
        let mut mu_cfg = icfg.clone();
        mu_cfg.breakpoints = lab_mu_breakpoints(model, omega, gamma, beta, omega_rot);
        let inner = integrate_finite(
            |mu: R| {
                let (w1, w2) = weight_lab(beta, mu, theta);
                let (b1, b2) = lab_braces(model, omega, mu, gamma, beta, omega_rot, w_t1, w_t2);
                outer_weight(mu, beta) * (w1 * b1 + w2 * b2)
            },
            -R::one(),
            R::one(),
            &mu_cfg,
        )
        .expect("inner bounds are fixed");
        let w4 = omega.powi(4);
        audit.record(&inner, w4);
        w4 * inner.value
    };

    let mut outer_cfg = cfg.clone();
    outer_cfg.breakpoints.extend(lab_omega_breakpoints(
        model, gamma, beta, omega_rot, omega_max,
    ));
    let raw = integrate_finite(outer_integrand, -omega_max, omega_max, &outer_cfg)?;
    Ok(finish_estimate(
        pref,
        raw,
        &audit,
        R::lit(2.0) * omega_max,
        cfg,
    ))
}

/// Assembles the final estimate. The inner-noise estimate joins the error.
///
/// Inner integrals that missed their (1000× tighter) tolerance are
/// tolerated as long as the combined error stays within 10× the requested
/// tolerance: the outer value may be cancellation-reduced far below the
/// scale of its integrand (near thermal equilibrium most of the braces
/// integrate away), and no outer subdivision budget can push inner
/// roundoff noise below an arbitrary cancellation factor. The error
/// estimate itself is always reported untouched.
fn finish_estimate<R: Real>(
    pref: R,
    raw: QuadResult<R>,
    audit: &InnerAudit<R>,
    width: R,
    cfg: &QuadratureConfig<R>,
) -> Estimate<R> {
    let noise = audit.noise(width);
    let total = raw.error_estimate + noise;
    let inner_ok = audit.all_converged.get()
        || total <= R::lit(10.0) * (cfg.rel_tol * raw.value.abs()).max(cfg.abs_tol);
    Estimate {
        value: pref * raw.value,
        error: pref.abs() * total,
        converged: raw.converged && inner_ok,
    }
}

/// Doppler-shift targets at which the lab integrands have absorption
/// features: `γω(1+βμ) = t` for the unshifted line at `t = ±ω₀`, the
/// rotation-shifted line at `t = ±ω₀ − Ω`, and the shifted-argument zero at
/// `t = −Ω`.
fn lab_shift_targets<R: Real>(w0: R, omega_rot: R) -> [R; 5] {
    [w0, -w0, w0 - omega_rot, -w0 - omega_rot, -omega_rot]
}

/// Frequencies at which a feature enters or leaves the `μ ∈ [−1, 1]` range,
/// used as outer breakpoints.
fn lab_omega_breakpoints<R: Real>(
    model: &PolarizabilityModel<R>,
    gamma: R,
    beta: R,
    omega_rot: R,
    omega_max: R,
) -> Vec<R> {
    let mut pts = vec![R::zero()];
    let Some(w0) = model.resonance_frequency() else {
        return pts;
    };
    for t in lab_shift_targets(w0, omega_rot) {
        for denom in [gamma * (R::one() + beta), gamma * (R::one() - beta)] {
            let w = t / denom;
            if w.abs() < omega_max {
                pts.push(w);
            }
        }
    }
    pts
}

/// Direction cosines at which the inner integrand crosses an absorption
/// feature at fixed `ω`, with half-width hints on either side.
fn lab_mu_breakpoints<R: Real>(
    model: &PolarizabilityModel<R>,
    omega: R,
    gamma: R,
    beta: R,
    omega_rot: R,
) -> Vec<R> {
    let mut pts = Vec::new();
    if beta <= R::zero() || omega == R::zero() {
        return pts;
    }
    let Some(w0) = model.resonance_frequency() else {
        return pts;
    };
    let gw = gamma * omega;
    let width = model.linewidth().unwrap_or(R::zero());
    for t in lab_shift_targets(w0, omega_rot) {
        let mu_c = (t / gw - R::one()) / beta;
        if mu_c > -R::one() && mu_c < R::one() {
            pts.push(mu_c);
            if width > R::zero() {
                let dm = R::lit(5.0) * width / (gw.abs() * beta);
                pts.push(mu_c - dm);
                pts.push(mu_c + dm);
            }
        }
    }
    pts
}

/// Positive-frequency absorption peaks of `α″(ω)`, `α″(ω ± Ω)` with
/// half-width hints, used as breakpoints on `[0, ∞)`.
fn resonance_breakpoints<R: Real>(model: &PolarizabilityModel<R>, omega_rot: R) -> Vec<R> {
    let mut pts = Vec::new();
    let Some(w0) = model.resonance_frequency() else {
        return pts;
    };
    let width = model.linewidth().unwrap_or(R::zero());
    let mut centers = vec![w0, w0 + omega_rot];
    let detuned = (w0 - omega_rot).abs();
    if detuned > R::zero() {
        centers.push(detuned);
    }
    if omega_rot > R::zero() {
        centers.push(omega_rot);
    }
    for c in centers {
        pts.push(c);
        if width > R::zero() {
            if c - R::lit(5.0) * width > R::zero() {
                pts.push(c - R::lit(5.0) * width);
            }
            pts.push(c + R::lit(5.0) * width);
        }
    }
    pts
}

/// `1/sinh²(ω/(2w))` with overflow saturating to zero.
fn inv_sinh_sq_half<R: Real>(omega: R, w: R) -> R {
    let s = (omega / (R::lit(2.0) * w)).sinh();
    (s * s).recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PhysicalConstants;
    use crate::kinematics::{BathSpec, KinematicState, ParticleSpec};
    use crate::polarizability::PolarizabilityModel;

    type C = PhysicalConstants<f64>;

    fn reduced() -> C {
        C::reduced()
    }

    fn lorentz(alpha0: f64, omega0: f64, gamma_d: f64) -> PolarizabilityModel<f64> {
        PolarizabilityModel::lorentz(alpha0, omega0, gamma_d).unwrap()
    }

    fn particle(model: PolarizabilityModel<f64>, t1: f64) -> ParticleSpec<f64> {
        ParticleSpec::new(1.0, 1e-9, t1, model).unwrap()
    }

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn lab_weights_sum_is_tilt_free() {
        for &beta in &[0.0, 0.3, 0.9] {
            for &mu in &[-1.0, -0.4, 0.0, 0.7, 1.0] {
                let expect = (1.0 - beta * beta) * (1.0 - mu * mu)
                    + (1.0 + beta * beta) * (1.0 + mu * mu)
                    + 4.0 * beta * mu;
                for &theta in &[0.0, 0.6, 1.2, std::f64::consts::PI] {
                    let (w1, w2) = weight_lab(beta, mu, theta);
                    assert!(
                        (w1 + w2 - expect).abs() < 1e-14,
                        "beta={beta} mu={mu} theta={theta}"
                    );
                }
            }
        }
    }

    #[test]
    fn lab_weights_at_rest_aligned() {
        let (w1, w2) = weight_lab(0.0_f64, 0.3, 0.0);
        assert!((w1 - (1.0 - 0.09)).abs() < 1e-15);
        assert!((w2 - (1.0 + 0.09)).abs() < 1e-15);
    }

    #[test]
    fn lab_weight_parity_breaks_only_with_motion() {
        let theta = 0.8;
        let (rest_plus, _) = weight_lab(0.0, 0.5, theta);
        let (rest_minus, _) = weight_lab(0.0, -0.5, theta);
        assert_eq!(rest_plus, rest_minus);
        let (moving_plus, _) = weight_lab(0.3, 0.5, theta);
        let (moving_minus, _) = weight_lab(0.3, -0.5, theta);
        assert!(moving_plus != moving_minus);
    }

    #[test]
    fn comoving_weights_sum_to_two_and_are_even() {
        for &mu in &[-0.9_f64, -0.2, 0.0, 0.5, 1.0] {
            for &theta in &[0.0, 0.7, 1.4] {
                let (a, b) = weight_comoving(mu, theta);
                assert!((a + b - 2.0).abs() < 1e-15);
                let (am, bm) = weight_comoving(-mu, theta);
                assert_eq!(a, am);
                assert_eq!(b, bm);
            }
        }
    }

    #[test]
    fn comoving_weight_second_moments() {
        // ∫μ²A dμ = (4/15)(1+sin²θ), ∫μ²B dμ = (4/15)(3+cos²θ).
        for &theta in &[0.0, 0.7, std::f64::consts::FRAC_PI_2] {
            let qa = integrate_finite(
                |mu: f64| mu * mu * weight_comoving(mu, theta).0,
                -1.0,
                1.0,
                &cfg(),
            )
            .unwrap();
            let qb = integrate_finite(
                |mu: f64| mu * mu * weight_comoving(mu, theta).1,
                -1.0,
                1.0,
                &cfg(),
            )
            .unwrap();
            let s2 = theta.sin().powi(2);
            let c2 = theta.cos().powi(2);
            assert!((qa.value - 4.0 / 15.0 * (1.0 + s2)).abs() < 1e-12);
            assert!((qb.value - 4.0 / 15.0 * (3.0 + c2)).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_vanishes_at_rest() {
        let consts = reduced();
        let r = kernel_k(ComovingWeight::A, 1.0, 0.0, 0.4, 0.2, &consts, &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn kernel_is_negative_for_motion() {
        let consts = reduced();
        let mut s: u64 = 0x1234_5678_9abc_def0;
        for _ in 0..40 {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let r1 = ((s >> 11) as f64) / (1u64 << 53) as f64;
            let beta = 0.05 + 0.9 * r1;
            let omega = 0.05 + 3.0 * r1;
            let theta = 3.0 * r1.fract();
            for kind in [ComovingWeight::A, ComovingWeight::B] {
                let r = kernel_k(kind, omega, beta, theta, 0.25, &consts, &cfg()).unwrap();
                assert!(r.value < 0.0, "beta={beta} omega={omega}");
            }
        }
    }

    #[test]
    fn kernel_is_odd_in_frequency() {
        let consts = reduced();
        for kind in [ComovingWeight::A, ComovingWeight::B] {
            let plus = kernel_k(kind, 0.8, 0.4, 0.9, 0.3, &consts, &cfg()).unwrap();
            let minus = kernel_k(kind, -0.8, 0.4, 0.9, 0.3, &consts, &cfg()).unwrap();
            let tol = (plus.error_estimate + minus.error_estimate).max(1e-12 * plus.value.abs());
            assert!(
                (plus.value + minus.value).abs() <= tol,
                "{} vs {}",
                plus.value,
                minus.value
            );
        }
    }

    #[test]
    fn kernel_decays_exponentially() {
        let consts = reduced();
        let (beta, t2) = (0.5, 0.25);
        let gamma = 1.0 / (1.0f64 - beta * beta).sqrt();
        let rate = gamma * (1.0 - beta) / t2; // thermal frequency = t2 in reduced units
        let k1 = kernel_k(ComovingWeight::A, 2.0, beta, 0.0, t2, &consts, &cfg()).unwrap();
        let k2 = kernel_k(ComovingWeight::A, 4.0, beta, 0.0, t2, &consts, &cfg()).unwrap();
        assert!(k2.value.abs() < k1.value.abs() * (-0.8 * rate * 2.0).exp());
    }

    #[test]
    fn lab_brace_limit_at_zero_frequency() {
        // b₁(ω→0) = 2·slope·(γ(1+βμ)·w_T2 − w_T1).
        let model = lorentz(1.4, 2.0, 0.3);
        let (beta, mu, gamma_d_t1, w_t2) = (0.5, 0.3, 0.35, 0.2);
        let gamma = 1.0 / (1.0f64 - beta * beta).sqrt();
        let slope = model.slope_at_zero().unwrap();
        let c1 = gamma * (1.0 + beta * mu);
        let expect = 2.0 * slope * (c1 * w_t2 - gamma_d_t1);
        let (b1, b2) = lab_braces(&model, 0.0, mu, gamma, beta, 0.7, gamma_d_t1, w_t2);
        assert!((b1 / expect - 1.0).abs() < 1e-14);
        assert_eq!(b2, 0.0);
        // Continuity: tiny but finite ω approaches the same limit.
        let (b1_eps, _) = lab_braces(&model, 1e-9, mu, gamma, beta, 0.7, gamma_d_t1, w_t2);
        assert!((b1_eps / expect - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lab_force_vanishes_at_rest() {
        let consts = reduced();
        let model = lorentz(1.0, 1.0, 0.1);
        let bath = BathSpec::new(0.2, &consts).unwrap();
        for (t1, omega_rot, theta) in [(0.2, 0.0, 0.0), (0.6, 0.4, 1.0), (0.07, 1.3, 2.0)] {
            let p = particle(model, t1);
            let state = KinematicState::new(0.0, omega_rot, theta).unwrap();
            let f = force_lab(&state, &p, &bath, &consts, &cfg()).unwrap();
            assert_eq!(f.value, 0.0, "t1={t1} omega={omega_rot} theta={theta}");
            assert!(f.converged);
        }
    }

    #[test]
    fn comoving_force_vanishes_at_rest() {
        let consts = reduced();
        let p = particle(lorentz(1.0, 1.0, 0.1), 0.5);
        let bath = BathSpec::new(0.2, &consts).unwrap();
        let state = KinematicState::new(0.0, 0.8, 0.9).unwrap();
        let f = force_comoving(&state, &p, &bath, &consts, &cfg()).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(f.converged);
    }

    #[test]
    fn comoving_force_is_friction_without_rotation() {
        let consts = reduced();
        let p = particle(lorentz(1.0, 1.0, 0.1), 0.3);
        let bath = BathSpec::new(0.2, &consts).unwrap();
        let state = KinematicState::new(0.3, 0.0, 0.6).unwrap();
        let f = force_comoving(&state, &p, &bath, &consts, &cfg()).unwrap();
        assert!(f.converged);
        assert!(f.value < 0.0);
    }

    #[test]
    fn comoving_force_tilt_free_without_rotation() {
        let consts = reduced();
        let p = particle(lorentz(1.0, 1.0, 0.1), 0.3);
        let bath = BathSpec::new(0.2, &consts).unwrap();
        let f0 = force_comoving(
            &KinematicState::new(0.4, 0.0, 0.0).unwrap(),
            &p,
            &bath,
            &consts,
            &cfg(),
        )
        .unwrap();
        let f90 = force_comoving(
            &KinematicState::new(0.4, 0.0, std::f64::consts::FRAC_PI_2).unwrap(),
            &p,
            &bath,
            &consts,
            &cfg(),
        )
        .unwrap();
        assert!(
            ((f0.value - f90.value) / f0.value).abs() < 1e-10,
            "{} vs {}",
            f0.value,
            f90.value
        );
    }

    #[test]
    fn heating_sign_follows_temperature_gap() {
        let consts = reduced();
        let model = lorentz(1.0, 1.0, 0.1);
        let bath = BathSpec::new(0.2, &consts).unwrap();
        let state = KinematicState::new(0.0, 0.0, 0.0).unwrap();

        let cold = heating_rate_lab(&state, &particle(model, 0.1), &bath, &consts, &cfg()).unwrap();
        assert!(
            cold.value > 0.0,
            "colder particle must absorb: {}",
            cold.value
        );

        let hot = heating_rate_lab(&state, &particle(model, 0.4), &bath, &consts, &cfg()).unwrap();
        assert!(hot.value < 0.0, "hotter particle must emit: {}", hot.value);

        let balanced =
            heating_rate_lab(&state, &particle(model, 0.2), &bath, &consts, &cfg()).unwrap();
        assert!(balanced.value.abs() <= balanced.error.max(1e-12 * cold.value.abs()));
    }

    #[test]
    fn mkrtchian_is_never_accelerating() {
        let consts = reduced();
        let model = lorentz(1.0, 1.0, 0.05);
        for &v in &[0.0, 0.01, 0.2] {
            let f = force_mkrtchian(v, &model, 0.2, &consts, &cfg()).unwrap();
            assert!(f.value <= 0.0);
            if v == 0.0 {
                assert_eq!(f.value, 0.0);
            }
        }
    }

    #[test]
    fn nonrel_reduces_to_zero_rotation_form() {
        let consts = reduced();
        let model = lorentz(1.0, 1.0, 0.08);
        let v = 0.01;
        let general = force_nonrel(v, 0.0, 0.9, &model, 0.2, &consts, &cfg()).unwrap();
        let reduced_form = force_mkrtchian(v, &model, 0.2, &consts, &cfg()).unwrap();
        let tol = (general.error + reduced_form.error).max(1e-10 * reduced_form.value.abs());
        assert!(
            (general.value - reduced_form.value).abs() <= tol,
            "{} vs {}",
            general.value,
            reduced_form.value
        );
    }

    #[test]
    fn nonrel_vanishes_at_zero_speed() {
        let consts = reduced();
        let model = lorentz(1.0, 1.0, 0.08);
        let f = force_nonrel(0.0, 0.3, 0.4, &model, 0.2, &consts, &cfg()).unwrap();
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn delta_models_are_rejected() {
        let consts = reduced();
        let delta = PolarizabilityModel::delta_resonance(1.0, 1.0).unwrap();
        let p = particle(delta, 0.2);
        let bath = BathSpec::new(0.2, &consts).unwrap();
        let state = KinematicState::new(0.3, 0.0, 0.0).unwrap();
        assert_eq!(
            force_comoving(&state, &p, &bath, &consts, &cfg()),
            Err(Error::DeltaNotPointwise)
        );
        assert_eq!(
            force_lab(&state, &p, &bath, &consts, &cfg()),
            Err(Error::DeltaNotPointwise)
        );
        assert_eq!(
            force_nonrel(0.1, 0.0, 0.0, &delta, 0.2, &consts, &cfg()),
            Err(Error::DeltaNotPointwise)
        );
    }

    #[test]
    fn breakdown_normalization_presence() {
        let consts = reduced();
        let p = particle(lorentz(1.0, 1.0, 0.1), 0.2);
        let bath = BathSpec::new(0.2, &consts).unwrap();

        let moving = force_breakdown(
            &KinematicState::new(0.2, 0.0, 0.0).unwrap(),
            &p,
            &bath,
            &consts,
            &cfg(),
        )
        .unwrap();
        let f0 = resonance_normalization(p.model(), 0.2, &consts).unwrap();
        assert!((moving.normalized.unwrap() - moving.f_prime_direct.value / f0).abs() < 1e-15);

        let at_rest = force_breakdown(
            &KinematicState::new(0.0, 0.0, 0.0).unwrap(),
            &p,
            &bath,
            &consts,
            &cfg(),
        )
        .unwrap();
        assert!(at_rest.normalized.is_none());
        assert_eq!(at_rest.f_x.value, 0.0);
        assert_eq!(at_rest.f_prime_direct.value, 0.0);
    }

    #[test]
    fn kernel_rejects_bad_arguments() {
        let consts = reduced();
        assert!(kernel_k(ComovingWeight::A, 0.0, 0.1, 0.0, 0.2, &consts, &cfg()).is_err());
        assert!(kernel_k(ComovingWeight::A, 1.0, 1.0, 0.0, 0.2, &consts, &cfg()).is_err());
        assert!(kernel_k(ComovingWeight::A, 1.0, 0.1, 0.0, -1.0, &consts, &cfg()).is_err());
    }
}
