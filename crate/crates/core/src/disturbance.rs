//! Boundary disturbances `b(t, omega)` at the outflow end and a checker for
//! the windowed `H^1` decay certificate
//! `int_{t-T_period}^t b^2 + b_t^2 <= C_nu exp(-nu t)`.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::RunningIntegral;

/// Relative slack folded into the certificate check for quadrature error.
pub const NOISE_QUADRATURE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceFamily {
    Zero,
    /// `A s(t) exp(-gamma t) sin(2 pi f t + phase)` with a quintic ramp `s`.
    DecayingBurst,
    /// The decaying burst multiplied by a cutoff that is identically zero
    /// for `t >= horizon - T_period`.
    CompactBurst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSpec {
    pub family: DisturbanceFamily,
    pub amplitude: f64,
    pub frequency: f64,
    pub decay: f64,
    pub phase: f64,
    /// Claimed decay rate of the windowed energy.
    pub nu: f64,
    /// Claimed prefactor of the windowed energy.
    pub c_nu: f64,
    pub t_period: f64,
    /// Final time `T`; only the compact family depends on it.
    pub horizon: f64,
    /// Scenario label `omega`. Carries no probabilistic meaning.
    pub seed: u64,
}

impl DisturbanceSpec {
    pub fn zero(t_period: f64, horizon: f64) -> Self {
        DisturbanceSpec {
            family: DisturbanceFamily::Zero,
            amplitude: 0.0,
            frequency: 0.0,
            decay: 0.0,
            phase: 0.0,
            nu: 1.0,
            c_nu: 1.0,
            t_period,
            horizon,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_period > 0.0 && self.t_period.is_finite()) {
            return Err(Error::param("disturbance.T_period", "T_period > 0"));
        }
        if !(self.nu > 0.0) {
            return Err(Error::param("disturbance.nu", "nu > 0"));
        }
        if !(self.c_nu > 0.0) {
            return Err(Error::param("disturbance.C_nu", "C_nu > 0"));
        }
        if self.family == DisturbanceFamily::Zero {
            return Ok(());
        }
        if !self.amplitude.is_finite() {
            return Err(Error::param("disturbance.A", "finite amplitude"));
        }
        if !(self.frequency >= 0.0 && self.frequency.is_finite()) {
            return Err(Error::param("disturbance.f", "f >= 0"));
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(Error::param("disturbance.gamma", "gamma >= 0"));
        }
        if self.family == DisturbanceFamily::CompactBurst && !(self.horizon > 1.5 * self.t_period) {
            return Err(Error::param(
                "solver.t_end",
                "t_end > 1.5 T_period for the compact_burst family",
            ));
        }
        Ok(())
    }

    /// True when `b` vanishes identically on `[horizon - T_period, horizon]`.
    pub fn quiet_final_window(&self) -> bool {
        matches!(
            self.family,
            DisturbanceFamily::Zero | DisturbanceFamily::CompactBurst
        ) || self.amplitude == 0.0
    }

    fn ramp_length(&self) -> f64 {
        0.5 * self.t_period
    }
}

/// Value and first two time derivatives of the boundary trace.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BoundarySample {
    pub b: f64,
    pub b_t: f64,
    pub b_tt: f64,
}

/// Second-order jet `(f, f', f'')`.
#[derive(Debug, Clone, Copy)]
struct Jet(f64, f64, f64);

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet(
            self.0 * o.0,
            self.1 * o.0 + self.0 * o.1,
            self.2 * o.0 + 2.0 * self.1 * o.1 + self.0 * o.2,
        )
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet(self.0 + o.0, self.1 + o.1, self.2 + o.2)
    }
}

/// Quintic smoothstep `10 s^3 - 15 s^4 + 6 s^5` on `[0, 1]`, clamped
/// outside, as a jet in `t` with `s = (t - start) / len`.
fn smoothstep(t: f64, start: f64, len: f64) -> Jet {
    let s = (t - start) / len;
    if s <= 0.0 {
        Jet(0.0, 0.0, 0.0)
    } else if s >= 1.0 {
        Jet(1.0, 0.0, 0.0)
    } else {
        let s2 = s * s;
        let value = s2 * s * (10.0 - 15.0 * s + 6.0 * s2);
        let d1 = 30.0 * s2 * (1.0 - s) * (1.0 - s);
        let d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
        Jet(value, d1 / len, d2 / (len * len))
    }
}

/// Closed-form `b`, `b_t`, `b_tt` at time `t >= 0`.
pub fn sample_b(spec: &DisturbanceSpec, t: f64) -> BoundarySample {
    if spec.family == DisturbanceFamily::Zero {
        return BoundarySample::default();
    }
    let omega = 2.0 * PI * spec.frequency;
    let g = spec.decay;
    let env = (-g * t).exp();
    let envelope = Jet(env, -g * env, g * g * env);
    let arg = omega * t + spec.phase;
    let carrier = Jet(arg.sin(), omega * arg.cos(), -omega * omega * arg.sin());
    let mut jet = smoothstep(t, 0.0, spec.ramp_length()) * envelope * carrier;
    if spec.family == DisturbanceFamily::CompactBurst {
        let len = spec.ramp_length();
        let end = spec.horizon - spec.t_period;
        let off = smoothstep(t, end - len, len);
        jet = jet * (Jet(1.0, 0.0, 0.0) + Jet(-off.0, -off.1, -off.2));
    }
    BoundarySample {
        b: spec.amplitude * jet.0,
        b_t: spec.amplitude * jet.1,
        b_tt: spec.amplitude * jet.2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseReport {
    /// `max_t W(t) / (C_nu exp(-nu t))` over `t` in `(T_period, T]`.
    pub worst_ratio: f64,
    pub worst_time: f64,
    /// Smallest prefactor for which the claimed rate holds on the samples.
    pub min_c_nu: f64,
    pub pass: bool,
}

/// Checks the windowed decay certificate on a sampled trace.
pub fn verify_noise_bound(
    times: &[f64],
    b: &[f64],
    b_t: &[f64],
    t_period: f64,
    nu: f64,
    c_nu: f64,
) -> Result<NoiseReport> {
    if times.len() != b.len() || times.len() != b_t.len() {
        return Err(Error::InsufficientData(
            "trace arrays differ in length".into(),
        ));
    }
    let (Some(&t0), Some(&t_end)) = (times.first(), times.last()) else {
        return Err(Error::InsufficientData("empty disturbance trace".into()));
    };
    if t_end - t0 <= t_period {
        return Err(Error::InsufficientData(format!(
            "trace length {} does not exceed T_period = {t_period}",
            t_end - t0
        )));
    }
    if !(c_nu > 0.0) {
        return Err(Error::param("disturbance.C_nu", "C_nu > 0"));
    }

    let energy: Vec<f64> = b.iter().zip(b_t).map(|(x, y)| x * x + y * y).collect();
    let running = RunningIntegral::new(times, &energy);
    let mut min_c_nu: f64 = 0.0;
    let mut worst_time = f64::NAN;
    for &t in times {
        if t - t0 <= t_period {
            continue;
        }
        let window = running.between(t - t_period, t);
        let scaled = window * (nu * t).exp();
        if scaled > min_c_nu || worst_time.is_nan() {
            min_c_nu = min_c_nu.max(scaled);
            worst_time = t;
        }
    }
    let worst_ratio = min_c_nu / c_nu;
    Ok(NoiseReport {
        worst_ratio,
        worst_time,
        min_c_nu,
        pass: worst_ratio <= 1.0 + NOISE_QUADRATURE_SLACK,
    })
}
