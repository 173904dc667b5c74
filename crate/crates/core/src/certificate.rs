//! Constants of the exponential-decay theorem, its hypotheses checked on a
//! concrete run, the Gronwall comparison, and the decay bounds themselves.

use std::f64::consts::E;

use serde::Serialize;

use crate::disturbance::NoiseReport;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::lyapunov::{energy_e, energy_h, EnergyBounds, LyapunovTrace};
use crate::stationary::{PipeParams, StationaryProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremConstants {
    pub lambda: f64,
    pub m1: f64,
    pub k1: f64,
    pub k2: f64,
    /// Certified decay rate `1 / (4 e L k)`.
    pub mu: f64,
    pub c0: f64,
    pub cg: f64,
    pub nu: f64,
    pub c_nu: f64,
    /// `nu - mu`; must be positive for the bounds to apply.
    pub delta: f64,
    /// Optimal rate of the linear wave equation with the same feedback,
    /// when `a k > 1`.
    pub mu0: Option<f64>,
    pub ratio_mu0_over_mu: Option<f64>,
    /// `min{1, 1/(4ke), (1-lambda) a/2, mu/(C0 K1)}`, cap on `ubar`.
    pub smallness_cap: f64,
    /// `min{1, mu/(C0 K1)}`, cap on `ubar_x` and on the perturbation jets.
    pub derivative_cap: f64,
    /// `ln(2 K1 K2) / mu + T_period` is added by the report; this is the
    /// first term only.
    pub half_time_offset: f64,
    pub length: f64,
}

/// Bracket `18 + 13 theta + (8 + 6 theta)/a^2` of the lower-order bound.
pub fn f_bound_factor(params: &PipeParams) -> f64 {
    let th = params.friction;
    let a2 = params.sound_speed * params.sound_speed;
    18.0 + 13.0 * th + (8.0 + 6.0 * th) / a2
}

pub fn compute_constants(
    params: &PipeParams,
    lambda: f64,
    nu: f64,
    c_nu: f64,
) -> Result<TheoremConstants> {
    if !(lambda > 0.5 && lambda < 1.0) {
        return Err(Error::param("certificate.lambda", "1/2 < lambda < 1"));
    }
    params.validate()?;
    let a = params.sound_speed;
    let k = params.gain;
    let l = params.length;
    let EnergyBounds { m1, k1, k2 } = EnergyBounds::new(params);
    let mu = 1.0 / (4.0 * E * l * k);
    let c0 = 12.0 * k + 4.0 * (k + 1.0) * f_bound_factor(params) + 10.0;
    let cg = ((4.0 / 3.0) * E * a * a * k * k + 1.0 / (2.0 * E * k1 * k)) * c_nu;
    let tiny = mu / (c0 * k1);
    let linear = linear_rate_mu0(a, l, k).ok();
    Ok(TheoremConstants {
        lambda,
        m1,
        k1,
        k2,
        mu,
        c0,
        cg,
        nu,
        c_nu,
        delta: nu - mu,
        mu0: linear.map(|r| r.mu0),
        ratio_mu0_over_mu: linear.map(|r| r.ratio_mu0_over_mu),
        smallness_cap: 1.0_f64
            .min(1.0 / (4.0 * k * E))
            .min((1.0 - lambda) * a / 2.0)
            .min(tiny),
        derivative_cap: 1.0_f64.min(tiny),
        half_time_offset: (2.0 * k1 * k2).ln() / mu,
        length: l,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearRate {
    pub mu0: f64,
    pub ratio_mu0_over_mu: f64,
}

/// Optimal decay rate `(a/L) ln(1 + 2/(ak - 1))` of the linear wave
/// equation under the same feedback, and its ratio to `1/(4eLk)`.
pub fn linear_rate_mu0(sound_speed: f64, length: f64, k: f64) -> Result<LinearRate> {
    let ak = sound_speed * k;
    if !(ak > 1.0) {
        return Err(Error::param(
            "feedback.k",
            "a k > 1 for the linear comparison",
        ));
    }
    let log_term = (2.0 / (ak - 1.0)).ln_1p();
    Ok(LinearRate {
        mu0: sound_speed / length * log_term,
        ratio_mu0_over_mu: 4.0 * E * ak * log_term,
    })
}

/// `exp(-mu t) (U0 + Cg / (nu - mu))`.
pub fn gronwall_bound(u0: f64, mu: f64, nu: f64, cg: f64, t: f64) -> Result<f64> {
    if !(nu > mu) {
        return Err(Error::param("disturbance.nu", format!("nu > mu = {mu}")));
    }
    Ok((-mu * t).exp() * (u0 + cg / (nu - mu)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallCheck {
    pub inequality_ok: bool,
    pub bound_ok: bool,
}

/// Checks the differential inequality `U' <= -mu U + Cg exp(-nu t)` and the
/// resulting bound on samples over a uniform grid.
///
/// The derivative is the centered difference; since that equals the mean
/// of `U'` over `[t - h, t + h]`, it is compared with the Simpson mean of
/// the right-hand side over the same interval.
pub fn verify_gronwall_discrete(
    samples: &[f64],
    times: &[f64],
    mu: f64,
    nu: f64,
    cg: f64,
) -> Result<GronwallCheck> {
    if samples.len() != times.len() || samples.len() < 3 {
        return Err(Error::InsufficientData(
            "need at least three equally long samples".into(),
        ));
    }
    let scale = samples
        .iter()
        .fold(cg.abs(), |m, &x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let slack = 1e-8 * scale;
    let rhs = |i: usize| -mu * samples[i] + cg * (-nu * times[i]).exp();
    let inequality_ok = (1..samples.len() - 1).all(|i| {
        let derivative = (samples[i + 1] - samples[i - 1]) / (times[i + 1] - times[i - 1]);
        let mean_rhs = (rhs(i - 1) + 4.0 * rhs(i) + rhs(i + 1)) / 6.0;
        derivative <= mean_rhs + slack
    });
    let t0 = times[0];
    let u0 = samples[0];
    let mut bound_ok = true;
    for (&u, &t) in samples.iter().zip(times) {
        if u > gronwall_bound(u0, mu, nu, cg, t - t0)? + slack {
            bound_ok = false;
            break;
        }
    }
    Ok(GronwallCheck {
        inequality_ok,
        bound_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flag {
    pub ok: bool,
    /// Time of the first violation for time-dependent hypotheses.
    pub first_violation: Option<f64>,
}

impl Flag {
    fn from(ok: bool) -> Self {
        Flag {
            ok,
            first_violation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// `k >= max{1, (4/3)(1/a + 1/a^2), 1/(lambda a)}`.
    pub gain: Flag,
    pub required_gain: f64,
    /// Smallness of `ubar` and `ubar_x`.
    pub stationary: Flag,
    /// Smallness of the perturbation at every step.
    pub perturbation: Flag,
    /// Windowed decay certificate of the disturbance.
    pub noise: Flag,
    pub m1_positive: Flag,
    pub rate_gap: Flag,
    /// Cap on `|u|`: `min{ubar(0), (1-lambda) a/2, 1/(4ke)}`.
    pub u_cap: f64,
    /// Largest `max{|u|, |u_x|, |u_t|} / derivative_cap` over the run.
    pub worst_jet_ratio: f64,
    /// Largest `|u| / u_cap` over the run.
    pub worst_u_ratio: f64,
    /// Per-step `T_Li(t) = max{|u|, |u_x|, |u_t|, ubar, ubar_x}`.
    pub t_li: Vec<f64>,
    /// Per-step pass/fail of the perturbation smallness.
    pub step_ok: Vec<bool>,
}

impl HypothesisReport {
    pub fn all_ok(&self) -> bool {
        [
            self.gain,
            self.stationary,
            self.perturbation,
            self.noise,
            self.m1_positive,
            self.rate_gap,
        ]
        .iter()
        .all(|f| f.ok)
    }
}

pub fn check_hypotheses(
    trajectory: &Trajectory,
    profile: &StationaryProfile,
    params: &PipeParams,
    constants: &TheoremConstants,
    noise: &NoiseReport,
) -> HypothesisReport {
    let a = params.sound_speed;
    let k = params.gain;
    let lambda = constants.lambda;
    let required_gain = 1.0_f64
        .max((4.0 / 3.0) * (1.0 / a + 1.0 / (a * a)))
        .max(1.0 / (lambda * a));

    let ubar_max = profile.max_ubar();
    let ubar_x_max = profile.max_ubar_x();
    let stationary_ok = profile.ubar.iter().all(|&u| u <= constants.smallness_cap)
        && profile
            .ubar_x
            .iter()
            .all(|&d| d <= constants.derivative_cap);

    let ubar0 = profile.ubar.first().copied().unwrap_or(0.0);
    let u_cap = ubar0.min((1.0 - lambda) * a / 2.0).min(1.0 / (4.0 * k * E));
    let mut first_violation = None;
    let mut worst_jet_ratio: f64 = 0.0;
    let mut worst_u_ratio: f64 = 0.0;
    let mut t_li = Vec::with_capacity(trajectory.norms.len());
    let mut step_ok = Vec::with_capacity(trajectory.norms.len());
    for n in &trajectory.norms {
        let jet = n.max_abs_u.max(n.max_abs_ux).max(n.max_abs_ut);
        t_li.push(jet.max(ubar_max).max(ubar_x_max));
        let ok = n.max_abs_u <= u_cap && jet <= constants.derivative_cap;
        worst_jet_ratio = worst_jet_ratio.max(jet / constants.derivative_cap);
        worst_u_ratio = worst_u_ratio.max(n.max_abs_u / u_cap);
        if !ok && first_violation.is_none() {
            first_violation = Some(n.t);
        }
        step_ok.push(ok);
    }

    HypothesisReport {
        gain: Flag::from(k >= required_gain),
        required_gain,
        stationary: Flag::from(stationary_ok),
        perturbation: Flag {
            ok: first_violation.is_none(),
            first_violation,
        },
        noise: Flag {
            ok: noise.pass,
            first_violation: (!noise.pass).then_some(noise.worst_time),
        },
        m1_positive: Flag::from(constants.m1 > 0.0),
        rate_gap: Flag::from(constants.delta > 0.0),
        u_cap,
        worst_jet_ratio,
        worst_u_ratio,
        t_li,
        step_ok,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub ok: bool,
    /// Smallest `rhs - lhs` over the checked samples.
    pub worst_margin: f64,
    pub worst_time: f64,
    /// `lhs / rhs` at the worst relative sample.
    pub worst_ratio: f64,
}

impl BoundCheck {
    fn new() -> Self {
        BoundCheck {
            ok: true,
            worst_margin: f64::INFINITY,
            worst_time: f64::NAN,
            worst_ratio: 0.0,
        }
    }

    fn update(&mut self, t: f64, lhs: f64, rhs: f64) {
        let margin = rhs - lhs;
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_time = t;
        }
        self.worst_ratio = self.worst_ratio.max(lhs / rhs);
        self.ok &= margin >= 0.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBounds {
    /// `E(T_period)`, the anchor of every bound.
    pub e_at_period: f64,
    /// `E(t) <= exp(-mu (t - T_period)) [E(T_period) + Cg/delta]`.
    pub energy: BoundCheck,
    /// `H(t) <= K1 exp(-mu (t - T_period)) [...] + 2 L C_nu exp(-nu t)`.
    pub h1: BoundCheck,
    /// Final-window `H^1` bound, checked when `b` vanishes there.
    pub final_window: Option<BoundCheck>,
}

impl DecayBounds {
    pub fn all_ok(&self) -> bool {
        self.energy.ok && self.h1.ok && self.final_window.is_none_or(|c| c.ok)
    }
}

/// Checks the decay bounds on every sample `t` in `(T_period, T]`.
pub fn verify_decay_bounds(
    trace: &LyapunovTrace,
    constants: &TheoremConstants,
    quiet_final_window: bool,
) -> Result<DecayBounds> {
    if !(constants.delta > 0.0) {
        return Err(Error::param(
            "disturbance.nu",
            format!(
                "nu > mu = {} (delta = nu - mu = {} is not positive)",
                constants.mu, constants.delta
            ),
        ));
    }
    let t_period = trace.t_period;
    let times = &trace.times;
    let t_last = times.last().copied().unwrap_or(f64::NEG_INFINITY);
    if t_last < t_period {
        return Err(Error::InsufficientData(format!(
            "trace ends at {t_last}, before T_period = {t_period}"
        )));
    }
    let e_at_period = energy_e(&trace.e1, times, t_period, t_period)?;
    let anchor = e_at_period + constants.cg / constants.delta;
    let envelope = |t: f64| (-constants.mu * (t - t_period)).exp() * anchor;

    let mut energy = BoundCheck::new();
    let mut h1 = BoundCheck::new();
    for (j, &t) in times.iter().enumerate() {
        if t <= t_period {
            continue;
        }
        let (Some(e), Some(h)) = (trace.e[j], trace.h[j]) else {
            continue;
        };
        energy.update(t, e, envelope(t));
        let h_rhs = constants.k1 * envelope(t)
            + 2.0 * constants.length * constants.c_nu * (-constants.nu * t).exp();
        h1.update(t, h, h_rhs);
    }

    let final_window = if quiet_final_window {
        let mut check = BoundCheck::new();
        let h_final = energy_h(&trace.h1_density, times, t_period, t_last)?;
        check.update(t_last, h_final, constants.k1 * envelope(t_last));
        Some(check)
    } else {
        None
    };

    Ok(DecayBounds {
        e_at_period,
        energy,
        h1,
        final_window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    BoundHoldsHypothesesFail,
    BoundViolated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::BoundHoldsHypothesesFail => "bound_holds_hypotheses_fail",
            Verdict::BoundViolated => "bound_violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub constants: TheoremConstants,
    pub hypotheses: HypothesisReport,
    pub bounds: DecayBounds,
    /// `ln(2 K1 K2)/mu + T_period`; informational.
    pub half_time: f64,
    pub verdict: Verdict,
}

pub fn assemble_report(
    constants: TheoremConstants,
    hypotheses: HypothesisReport,
    bounds: DecayBounds,
    t_period: f64,
) -> CertificateReport {
    let verdict = if !bounds.all_ok() {
        Verdict::BoundViolated
    } else if hypotheses.all_ok() {
        Verdict::Certified
    } else {
        Verdict::BoundHoldsHypothesesFail
    };
    CertificateReport {
        half_time: constants.half_time_offset + t_period,
        constants,
        hypotheses,
        bounds,
        verdict,
    }
}
