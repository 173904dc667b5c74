//! Subsonic stationary states of isothermal pipe flow.
//!
//! With positive flow the stationary velocity solves
//! `u' = (theta / 2) u^3 / (a^2 - u^2)` and has the closed form
//! `u(x) = a / sqrt(-W_{-1}(-exp(theta x + c1)))`, valid up to the critical
//! length where the flow turns sonic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::lambert_w_minus1_neg_exp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDirection {
    Positive,
    Negative,
}

impl FlowDirection {
    pub fn sign(self) -> f64 {
        match self {
            FlowDirection::Positive => 1.0,
            FlowDirection::Negative => -1.0,
        }
    }
}

/// Physical description of a single pipe with its boundary feedback gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipeParams {
    /// Pipe length `L`.
    pub length: f64,
    /// Sound speed `a`.
    pub sound_speed: f64,
    /// Friction ratio `theta = f_g / diameter`.
    pub friction: f64,
    pub direction: FlowDirection,
    /// Neumann feedback gain `k`.
    pub gain: f64,
}

impl PipeParams {
    pub fn new(length: f64, sound_speed: f64, friction: f64, gain: f64) -> Result<Self> {
        let params = PipeParams {
            length,
            sound_speed,
            friction,
            direction: FlowDirection::Positive,
            gain,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::param("pipe.L", "L > 0"));
        }
        if !(self.sound_speed > 0.0 && self.sound_speed.is_finite()) {
            return Err(Error::param("pipe.a", "a > 0"));
        }
        if !(self.friction >= 0.0 && self.friction.is_finite()) {
            return Err(Error::param("pipe.theta", "theta >= 0"));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::param("feedback.k", "feedback.k > 0"));
        }
        Ok(())
    }
}

/// Sampled stationary velocity on a spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryProfile {
    pub u0: f64,
    /// Lambert constant fixed by `u(0) = u0`; always below `-1`.
    pub c1: f64,
    pub critical_length: f64,
    pub xs: Vec<f64>,
    pub ubar: Vec<f64>,
    pub ubar_x: Vec<f64>,
}

impl StationaryProfile {
    /// A profile with a prescribed constant value and zero slope. It is not
    /// a stationary state unless `theta = 0`; the linear wave limit uses it
    /// with `value = 0`.
    pub fn uniform(xs: Vec<f64>, value: f64) -> Self {
        let n = xs.len();
        StationaryProfile {
            u0: value,
            c1: f64::NAN,
            critical_length: f64::INFINITY,
            xs,
            ubar: vec![value; n],
            ubar_x: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn max_ubar(&self) -> f64 {
        self.ubar.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn max_ubar_x(&self) -> f64 {
        self.ubar_x.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// `nx + 1` equally spaced abscissae on `[0, length]`.
pub fn uniform_grid(length: f64, nx: usize) -> Vec<f64> {
    let dx = length / nx as f64;
    (0..=nx)
        .map(|i| if i == nx { length } else { i as f64 * dx })
        .collect()
}

/// The constant `c1 = ln(a^2/u0^2) - a^2/u0^2` that places `u0` at `x = 0`.
pub fn lambert_constant(sound_speed: f64, u0: f64) -> f64 {
    let r2 = (sound_speed / u0).powi(2);
    r2.ln() - r2
}

fn check_inflow(params: &PipeParams, u0: f64) -> Result<()> {
    if params.direction != FlowDirection::Positive {
        return Err(Error::param(
            "pipe.sigma",
            "positive flow direction (sigma = +1)",
        ));
    }
    if !(u0 > 0.0 && u0 < params.sound_speed) {
        return Err(Error::param("stationary.u0", "0 < u0 < a"));
    }
    Ok(())
}

/// Length at which the stationary flow starting at `u0` becomes sonic.
/// Infinite without friction.
pub fn critical_length(params: &PipeParams, u0: f64) -> Result<f64> {
    check_inflow(params, u0)?;
    if params.friction == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-1.0 - lambert_constant(params.sound_speed, u0)) / params.friction)
}

/// Closed-form stationary velocity at `x` for the Lambert constant `c1`.
pub fn stationary_velocity(params: &PipeParams, c1: f64, x: f64) -> Result<f64> {
    let w = lambert_w_minus1_neg_exp(params.friction * x + c1)?;
    Ok(params.sound_speed / (-w).sqrt())
}

/// Right-hand side of the stationary ODE for positive velocity.
pub fn stationary_slope(params: &PipeParams, u: f64) -> f64 {
    let a = params.sound_speed;
    0.5 * params.friction * u * u * u / (a * a - u * u)
}

pub fn build_stationary(params: &PipeParams, u0: f64, xs: &[f64]) -> Result<StationaryProfile> {
    params.validate()?;
    check_inflow(params, u0)?;
    let l_crit = critical_length(params, u0)?;
    if params.length >= l_crit {
        return Err(Error::param(
            "pipe.L",
            format!("L < critical length {l_crit} for u0 = {u0}"),
        ));
    }
    if let Some(&x) = xs.iter().find(|&&x| !(0.0..=params.length).contains(&x)) {
        return Err(Error::domain(
            "build_stationary",
            format!("grid point {x} outside [0, L]"),
        ));
    }

    let c1 = lambert_constant(params.sound_speed, u0);
    let ubar = if params.friction == 0.0 {
        vec![u0; xs.len()]
    } else {
        xs.iter()
            .map(|&x| stationary_velocity(params, c1, x))
            .collect::<Result<Vec<_>>>()?
    };
    let ubar_x = ubar.iter().map(|&u| stationary_slope(params, u)).collect();
    Ok(StationaryProfile {
        u0,
        c1,
        critical_length: l_crit,
        xs: xs.to_vec(),
        ubar,
        ubar_x,
    })
}

/// Integrates the stationary ODE from `u0` with classical RK4 using four
/// substeps per grid interval and returns the largest relative deviation
/// from the closed-form samples.
pub fn verify_stationary_ode(profile: &StationaryProfile, params: &PipeParams) -> f64 {
    verify_stationary_ode_with(profile, params, 4)
}

pub fn verify_stationary_ode_with(
    profile: &StationaryProfile,
    params: &PipeParams,
    substeps: usize,
) -> f64 {
    let f = |u: f64| stationary_slope(params, u);
    let mut u = profile.u0;
    let mut worst: f64 = 0.0;
    let mut x_prev = 0.0;
    for (&x, &closed) in profile.xs.iter().zip(&profile.ubar) {
        let h = (x - x_prev) / substeps as f64;
        if h > 0.0 {
            for _ in 0..substeps {
                let k1 = f(u);
                let k2 = f(u + 0.5 * h * k1);
                let k3 = f(u + 0.5 * h * k2);
                let k4 = f(u + h * k3);
                u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        x_prev = x;
        worst = worst.max(((u - closed) / closed).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(theta: f64, length: f64) -> PipeParams {
        PipeParams::new(length, 1.0, theta, 1.0).unwrap()
    }

    #[test]
    fn lambert_constant_for_half_sound_speed() {
        let c1 = lambert_constant(3.0, 1.5);
        assert!((c1 - (4.0_f64.ln() - 4.0)).abs() < 1e-14);
        assert!((c1 + 2.61371).abs() < 1e-5);
    }

    #[test]
    fn critical_length_values() {
        let l = critical_length(&params(1.0, 0.1), 0.5).unwrap();
        assert!((l - (3.0 - 4.0_f64.ln())).abs() < 1e-13);
        let l2 = critical_length(&params(2.0, 0.1), 0.5).unwrap();
        assert!((l2 - 0.5 * l).abs() < 1e-14);
        assert!(critical_length(&params(0.0, 0.1), 0.5)
            .unwrap()
            .is_infinite());
        let near_sonic = critical_length(&params(1.0, 1e-9), 1.0 - 1e-6).unwrap();
        assert!(near_sonic < 1e-10);
    }

    #[test]
    fn velocity_reaches_sound_speed_at_critical_length() {
        let p = params(1.0, 0.1);
        let l = critical_length(&p, 0.5).unwrap();
        let c1 = lambert_constant(1.0, 0.5);
        let u = stationary_velocity(&p, c1, l).unwrap();
        assert!((u - 1.0).abs() < 1e-6);
        let u_before = stationary_velocity(&p, c1, l * (1.0 - 1e-12)).unwrap();
        assert!((u_before - 1.0).abs() < 1e-5);
    }

    #[test]
    fn profile_hits_inflow_value_and_increases() {
        let p = params(1.0, 1.0);
        let xs = uniform_grid(1.0, 64);
        let prof = build_stationary(&p, 0.5, &xs).unwrap();
        assert!((prof.ubar[0] - 0.5).abs() < 1e-14);
        assert!(prof.ubar.windows(2).all(|w| w[1] > w[0]));
        assert!(prof.ubar.iter().all(|&u| u > 0.0 && u < 1.0));
        for (&u, &ux) in prof.ubar.iter().zip(&prof.ubar_x) {
            assert!(ux > 0.0);
            assert!((ux - 0.5 * u.powi(3) / (1.0 - u * u)).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_friction_is_constant() {
        let p = params(0.0, 5.0);
        let xs = uniform_grid(5.0, 16);
        let prof = build_stationary(&p, 0.3, &xs).unwrap();
        assert!(prof.ubar.iter().all(|&u| u == 0.3));
        assert!(prof.ubar_x.iter().all(|&d| d == 0.0));
        assert_eq!(verify_stationary_ode(&prof, &p), 0.0);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let p = params(1.0, 2.0);
        let xs = uniform_grid(2.0, 8);
        assert!(build_stationary(&p, 0.5, &xs).is_err());
        let p = params(1.0, 1.0);
        assert!(build_stationary(&p, 0.0, &xs).is_err());
        assert!(build_stationary(&p, 1.0, &xs).is_err());
        let mut neg = p;
        neg.direction = FlowDirection::Negative;
        assert!(build_stationary(&neg, 0.5, &uniform_grid(1.0, 8)).is_err());
        assert!(PipeParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PipeParams::new(-1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn tiny_inflow_velocity_does_not_underflow() {
        let p = PipeParams::new(1.0, 2.0, 0.1, 4.0).unwrap();
        let xs = uniform_grid(1.0, 100);
        let prof = build_stationary(&p, 0.02, &xs).unwrap();
        assert!((prof.ubar[0] - 0.02).abs() < 1e-15);
        assert!(verify_stationary_ode(&prof, &p) < 1e-12);
    }

    #[test]
    fn ode_cross_check_converges_at_fourth_order() {
        let lc = 3.0 - 4.0_f64.ln();
        let p = params(1.0, 0.9 * lc);
        let xs = uniform_grid(p.length, 16);
        let prof = build_stationary(&p, 0.5, &xs).unwrap();
        let e1 = verify_stationary_ode_with(&prof, &p, 2);
        let e2 = verify_stationary_ode_with(&prof, &p, 4);
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }
}
