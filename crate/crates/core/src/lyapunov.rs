//! Energy functionals of the closed loop: the weighted energy `E1`, its
//! trailing-window average `E`, the windowed `H^1` content `H`, and the
//! classical wave energy. Spatial integrals use the trapezoid rule on the
//! solver grid.

use serde::Serialize;

use crate::dynamics::FieldState;
use crate::error::{Error, Result};
use crate::quadrature::{trapezoid_uniform, windowed_integrals, RunningIntegral};
use crate::stationary::{PipeParams, StationaryProfile};

/// Absolute slack used when comparing the two sides of an energy bound.
pub const EQUIVALENCE_SLACK: f64 = 1e-10;

fn grid_step(state: &FieldState) -> f64 {
    if state.len() < 2 {
        0.0
    } else {
        state.xs[1] - state.xs[0]
    }
}

/// `int k[(a^2 - (ubar+u)^2) u_x^2 + u_t^2] - 2 exp(-x/L)[(ubar+u) u_x^2 + u_t u_x] dx`.
pub fn energy_e1(state: &FieldState, profile: &StationaryProfile, params: &PipeParams) -> f64 {
    let a2 = params.sound_speed * params.sound_speed;
    let k = params.gain;
    let length = params.length;
    trapezoid_uniform(state.len(), grid_step(state), |i| {
        let c = profile.ubar[i] + state.u[i];
        let (v, w) = (state.v[i], state.w[i]);
        let weight = (-state.xs[i] / length).exp();
        k * ((a2 - c * c) * w * w + v * v) - 2.0 * weight * (c * w * w + v * w)
    })
}

/// `k int a^2 u_x^2 + u_t^2 dx`.
pub fn energy_classic(state: &FieldState, k: f64, sound_speed: f64) -> f64 {
    let a2 = sound_speed * sound_speed;
    trapezoid_uniform(state.len(), grid_step(state), |i| {
        k * (a2 * state.w[i] * state.w[i] + state.v[i] * state.v[i])
    })
}

/// `int u_t^2 + u_x^2 dx`.
pub fn grad_norm(state: &FieldState) -> f64 {
    trapezoid_uniform(state.len(), grid_step(state), |i| {
        state.v[i] * state.v[i] + state.w[i] * state.w[i]
    })
}

/// `int u^2 + u_x^2 + u_t^2 dx`.
pub fn h1_density(state: &FieldState) -> f64 {
    trapezoid_uniform(state.len(), grid_step(state), |i| {
        state.u[i] * state.u[i] + state.v[i] * state.v[i] + state.w[i] * state.w[i]
    })
}

fn window_integral(series: &[f64], times: &[f64], t_period: f64, t: f64) -> Result<f64> {
    if series.len() != times.len() || times.is_empty() {
        return Err(Error::InsufficientData(
            "series and times must be non-empty and equally long".into(),
        ));
    }
    let t0 = times[0];
    let t_last = times[times.len() - 1];
    let tol = 1e-12 * t_period.max(1.0);
    if t < t_period - tol || t - t_period < t0 - tol || t > t_last + tol {
        return Err(Error::InsufficientData(format!(
            "window [{}, {t}] not covered by samples on [{t0}, {t_last}]",
            t - t_period
        )));
    }
    Ok(RunningIntegral::new(times, series).between((t - t_period).max(t0), t.min(t_last)))
}

/// Trailing-window integral of `E1` over `[t - T_period, t]`.
pub fn energy_e(e1: &[f64], times: &[f64], t_period: f64, t: f64) -> Result<f64> {
    window_integral(e1, times, t_period, t)
}

/// Windowed `H^1` content: trailing-window integral of [`h1_density`].
pub fn energy_h(h1: &[f64], times: &[f64], t_period: f64, t: f64) -> Result<f64> {
    window_integral(h1, times, t_period, t)
}

/// Constants of the energy-equivalence inequalities
/// `M1 |grad u|^2 <= E1 <= K2 |grad u|^2` and
/// `int u_t^2 + (1 + 2L^2) u_x^2 <= K1 E1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBounds {
    pub m1: f64,
    pub k1: f64,
    pub k2: f64,
}

impl EnergyBounds {
    pub fn new(params: &PipeParams) -> Self {
        let a = params.sound_speed;
        let k = params.gain;
        let l = params.length;
        let m1 = (0.75 * k * a * a - a - 1.0).min(k - 1.0);
        let k2 = (k * a * a + a + 1.0).max(k + 1.0);
        EnergyBounds {
            m1,
            k1: (1.0 + 2.0 * l * l) / m1,
            k2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub lhs_ok: bool,
    pub rhs_ok: bool,
    pub weighted_ok: bool,
    /// Set when `0 <= ubar + u <= a/2` fails somewhere or `M1 <= 0`.
    pub precondition_violated: bool,
    pub e1: f64,
    pub grad_norm: f64,
    pub weighted_grad_norm: f64,
}

impl EquivalenceReport {
    pub fn all_ok(&self) -> bool {
        self.lhs_ok && self.rhs_ok && self.weighted_ok
    }
}

pub fn check_equivalence(
    state: &FieldState,
    profile: &StationaryProfile,
    params: &PipeParams,
    bounds: &EnergyBounds,
) -> EquivalenceReport {
    let e1 = energy_e1(state, profile, params);
    let grad = grad_norm(state);
    let l = params.length;
    let weighted = trapezoid_uniform(state.len(), grid_step(state), |i| {
        state.v[i] * state.v[i] + (1.0 + 2.0 * l * l) * state.w[i] * state.w[i]
    });
    let precondition_violated =
        !(bounds.m1 > 0.0) || !state.in_subsonic_window(profile, params.sound_speed);
    EquivalenceReport {
        lhs_ok: bounds.m1 * grad <= e1 + EQUIVALENCE_SLACK,
        rhs_ok: e1 <= bounds.k2 * grad + EQUIVALENCE_SLACK,
        weighted_ok: weighted <= bounds.k1 * e1 + EQUIVALENCE_SLACK,
        precondition_violated,
        e1,
        grad_norm: grad,
        weighted_grad_norm: weighted,
    }
}

/// Per-step energy series of a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LyapunovTrace {
    pub t_period: f64,
    pub times: Vec<f64>,
    pub e1: Vec<f64>,
    /// `E(t)`, defined once a full window is available.
    pub e: Vec<Option<f64>>,
    /// `H(t)`, defined once a full window is available.
    pub h: Vec<Option<f64>>,
    pub e_classic: Vec<f64>,
    pub grad_norm: Vec<f64>,
    pub h1_density: Vec<f64>,
}

/// Collects per-step energies while a simulation runs.
#[derive(Debug, Clone, Default)]
pub struct LyapunovRecorder {
    times: Vec<f64>,
    e1: Vec<f64>,
    e_classic: Vec<f64>,
    grad_norm: Vec<f64>,
    h1_density: Vec<f64>,
}

impl LyapunovRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, state: &FieldState, profile: &StationaryProfile, params: &PipeParams) {
        self.times.push(state.t);
        self.e1.push(energy_e1(state, profile, params));
        self.e_classic
            .push(energy_classic(state, params.gain, params.sound_speed));
        self.grad_norm.push(grad_norm(state));
        self.h1_density.push(h1_density(state));
    }

    pub fn finish(self, t_period: f64) -> LyapunovTrace {
        let e = windowed_integrals(&self.times, &self.e1, t_period);
        let h = windowed_integrals(&self.times, &self.h1_density, t_period);
        LyapunovTrace {
            t_period,
            times: self.times,
            e1: self.e1,
            e,
            h,
            e_classic: self.e_classic,
            grad_norm: self.grad_norm,
            h1_density: self.h1_density,
        }
    }
}

impl LyapunovTrace {
    /// Index of the first sample whose window is complete.
    pub fn first_window_index(&self) -> Option<usize> {
        self.e.iter().position(Option::is_some)
    }

    /// Number of samples with `E1 < 0`.
    pub fn negative_e1_count(&self) -> usize {
        self.e1.iter().filter(|&&x| x < 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Negated slope of `ln(series)`; positive means decay.
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub used: usize,
    /// Samples in the window dropped for being non-positive.
    pub excluded: usize,
}

/// Least-squares line through `(t, ln series(t))` for `t` in `window`.
pub fn fit_decay_rate(series: &[f64], times: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    let mut excluded = 0;
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(series)
        .filter(|(&t, _)| t >= window.0 && t <= window.1)
        .filter_map(|(&t, &y)| {
            if y > 0.0 && y.is_finite() {
                Some((t, y.ln()))
            } else {
                excluded += 1;
                None
            }
        })
        .collect();
    if points.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} usable samples in [{}, {}], need at least 8",
            points.len(),
            window.0,
            window.1
        )));
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &points {
        let (dt, dy) = (t - mean_t, y - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    let slope = sty / stt;
    let intercept = mean_y - slope * mean_t;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sty * sty / (stt * syy)
    };
    Ok(DecayFit {
        rate: -slope,
        intercept,
        r_squared,
        used: points.len(),
        excluded,
    })
}
