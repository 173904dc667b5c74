//! Closed-loop quasilinear wave equation for the velocity perturbation
//! `u = u_total - ubar`:
//!
//! ```text
//! u_tt + 2 (ubar + u) u_tx - (a^2 - (ubar + u)^2) u_xx = F
//! u_x(t, 0) = k u_t(t, 0),    u(t, L) = b(t)
//! ```
//!
//! The solver works on the first-order system `v = u_t`, `w = u_x`:
//! `v_t + 2 c v_x - (a^2 - c^2) w_x = F`, `w_t - v_x = 0`, `c = ubar + u`,
//! whose characteristic speeds are `c + a` and `c - a`. Interior nodes use
//! the two-step (Richtmyer) Lax-Wendroff scheme; each end combines its
//! physical condition with the compatibility relation of the outgoing
//! characteristic.

use serde::{Deserialize, Serialize};

use crate::disturbance::{sample_b, BoundarySample, DisturbanceSpec};
use crate::error::{Error, Result};
use crate::stationary::{PipeParams, StationaryProfile};

/// Lower-order term of the quasilinear wave equation in the total velocity.
pub fn f_tilde(u: f64, ux: f64, ut: f64, theta: f64) -> f64 {
    -2.0 * ut * ux - 2.0 * u * ux * ux - 1.5 * theta * u * u.abs() * ux - theta * u.abs() * ut
}

/// Lower-order term `F` of the perturbation equation at a point with
/// stationary values `(ubar, ubar_x)`, from its definition.
pub fn lower_order_f_pointwise(
    ubar: f64,
    ubar_x: f64,
    u: f64,
    ux: f64,
    ut: f64,
    params: &PipeParams,
) -> Result<f64> {
    let a2 = params.sound_speed * params.sound_speed;
    let denom = a2 - ubar * ubar;
    if denom <= 0.0 {
        return Err(Error::domain(
            "lower_order_f",
            format!("stationary state {ubar} is not subsonic"),
        ));
    }
    let theta = params.friction;
    let c = ubar + u;
    Ok(f_tilde(c, ux + ubar_x, ut, theta)
        - (a2 - c * c) / denom * f_tilde(ubar, ubar_x, 0.0, theta))
}

/// Polynomial form of `F`, valid when `ubar > 0` and `ubar + u >= 0`.
pub fn lower_order_f_expanded(
    ubar: f64,
    ubar_x: f64,
    u: f64,
    ux: f64,
    ut: f64,
    params: &PipeParams,
) -> Result<f64> {
    let a2 = params.sound_speed * params.sound_speed;
    let denom = a2 - ubar * ubar;
    if denom <= 0.0 {
        return Err(Error::domain(
            "lower_order_f_expanded",
            format!("stationary state {ubar} is not subsonic"),
        ));
    }
    let th = params.friction;
    let sx = ux + ubar_x;
    Ok(-2.0 * ut * sx
        - th * (u + ubar) * ut
        - 2.0 * u * sx * sx
        - 4.0 * ubar * ubar_x * ux
        - 2.0 * ubar * ux * ux
        - 1.5 * th * u * (u + 2.0 * ubar) * sx
        - 1.5 * th * ubar * ubar * ux
        - (2.0 * u * ubar + u * u) / denom
            * (2.0 * ubar * ubar_x * ubar_x + 1.5 * th * ubar * ubar * ubar_x))
}

/// `F` at grid node `i` of `profile`.
pub fn lower_order_f(
    profile: &StationaryProfile,
    i: usize,
    u: f64,
    ux: f64,
    ut: f64,
    params: &PipeParams,
) -> Result<f64> {
    lower_order_f_pointwise(profile.ubar[i], profile.ubar_x[i], u, ux, ut, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiemannInvariants {
    pub r_plus: f64,
    pub r_minus: f64,
    /// `q / rho`, equal to `-(r_plus + r_minus) / 2`.
    pub velocity: f64,
}

/// Riemann invariants `-q/rho -+ a ln(rho)` of the isothermal Euler system.
pub fn riemann_invariants(rho: f64, q: f64, sound_speed: f64) -> Result<RiemannInvariants> {
    if !(rho > 0.0) {
        return Err(Error::domain(
            "riemann_invariants",
            format!("density {rho} must be positive"),
        ));
    }
    let vel = q / rho;
    let log_term = sound_speed * rho.ln();
    let r_plus = -vel - log_term;
    let r_minus = -vel + log_term;
    Ok(RiemannInvariants {
        r_plus,
        r_minus,
        velocity: -0.5 * (r_plus + r_minus),
    })
}

/// Snapshot of `(u, u_t, u_x)` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    pub t: f64,
    pub xs: Vec<f64>,
    pub u: Vec<f64>,
    /// `u_t`
    pub v: Vec<f64>,
    /// `u_x`
    pub w: Vec<f64>,
}

impl FieldState {
    pub fn zeros(xs: &[f64]) -> Self {
        let n = xs.len();
        FieldState {
            t: 0.0,
            xs: xs.to_vec(),
            u: vec![0.0; n],
            v: vec![0.0; n],
            w: vec![0.0; n],
        }
    }

    /// Builds a state from a function returning `(u, u_t, u_x)` at `x`.
    pub fn from_fn(xs: &[f64], t: f64, f: impl Fn(f64) -> (f64, f64, f64)) -> Self {
        let mut s = FieldState::zeros(xs);
        s.t = t;
        for (i, &x) in xs.iter().enumerate() {
            let (u, v, w) = f(x);
            s.u[i] = u;
            s.v[i] = v;
            s.w[i] = w;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn max_abs_u(&self) -> f64 {
        max_abs(&self.u)
    }

    pub fn max_abs_v(&self) -> f64 {
        max_abs(&self.v)
    }

    pub fn max_abs_w(&self) -> f64 {
        max_abs(&self.w)
    }

    /// Largest deviation of `w` from a second-order difference of `u`.
    pub fn compatibility_defect(&self) -> f64 {
        let n = self.len();
        if n < 3 {
            return 0.0;
        }
        let dx = self.xs[1] - self.xs[0];
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let d = if i == 0 {
                (-3.0 * self.u[0] + 4.0 * self.u[1] - self.u[2]) / (2.0 * dx)
            } else if i == n - 1 {
                (3.0 * self.u[n - 1] - 4.0 * self.u[n - 2] + self.u[n - 3]) / (2.0 * dx)
            } else {
                (self.u[i + 1] - self.u[i - 1]) / (2.0 * dx)
            };
            worst = worst.max((self.w[i] - d).abs());
        }
        worst
    }

    /// True when `0 <= ubar + u <= a/2` at every node.
    pub fn in_subsonic_window(&self, profile: &StationaryProfile, sound_speed: f64) -> bool {
        self.u
            .iter()
            .zip(&profile.ubar)
            .all(|(&u, &ub)| (0.0..=0.5 * sound_speed).contains(&(ub + u)))
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// Families of initial data `(phi, psi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    /// `phi(x) = amplitude (1 - r^2)^6`, `r = (x - center) / width`, for
    /// `|r| < 1`, zero elsewhere; `psi = 0`.
    Bump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
}

impl InitialData {
    /// Rejects data whose support touches a boundary, which is what makes
    /// the data compatible with both boundary conditions to every order.
    pub fn validate(&self, length: f64) -> Result<()> {
        if let InitialData::Bump {
            amplitude,
            center,
            width,
        } = *self
        {
            if !amplitude.is_finite() {
                return Err(Error::param("initial.amplitude", "finite amplitude"));
            }
            if !(width > 0.0) {
                return Err(Error::param("initial.width", "width > 0"));
            }
            if !(center - width > 0.0 && center + width < length) {
                return Err(Error::param(
                    "initial.center",
                    "bump support (center - width, center + width) strictly inside (0, L)",
                ));
            }
        }
        Ok(())
    }

    pub fn to_state(&self, xs: &[f64]) -> FieldState {
        match *self {
            InitialData::Zero => FieldState::zeros(xs),
            InitialData::Bump {
                amplitude,
                center,
                width,
            } => FieldState::from_fn(xs, 0.0, |x| {
                let (phi, dphi) = bump(x, center, width);
                (amplitude * phi, 0.0, amplitude * dphi)
            }),
        }
    }
}

/// `(1 - r^2)^6` and its `x`-derivative.
pub fn bump(x: f64, center: f64, width: f64) -> (f64, f64) {
    let r = (x - center) / width;
    if r.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - r * r;
    let q5 = q.powi(5);
    (q5 * q, -12.0 * r * q5 / width)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Number of cells; the grid has `nx + 1` nodes.
    pub nx: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_dt: f64,
    /// Abort when `max |u|` exceeds this value; defaults to the sound speed.
    pub guard: Option<f64>,
}

impl SolverConfig {
    pub const DEFAULT_CFL: f64 = 0.45;

    pub fn validate(&self) -> Result<()> {
        if self.nx < 16 {
            return Err(Error::param("solver.nx", "nx >= 16"));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::param("solver.cfl", "0 < cfl < 1"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("solver.t_end", "t_end > 0"));
        }
        if !(self.snapshot_dt > 0.0) {
            return Err(Error::param("solver.snapshot_dt", "snapshot_dt > 0"));
        }
        Ok(())
    }
}

/// Boundary values recorded after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryRecord {
    pub t: f64,
    pub u_0: f64,
    pub ut_0: f64,
    pub ux_0: f64,
    pub u_l: f64,
    pub ux_l: f64,
    pub b: f64,
    pub b_t: f64,
}

impl BoundaryRecord {
    fn new(state: &FieldState, boundary: BoundarySample) -> Self {
        let n = state.len() - 1;
        BoundaryRecord {
            t: state.t,
            u_0: state.u[0],
            ut_0: state.v[0],
            ux_0: state.w[0],
            u_l: state.u[n],
            ux_l: state.w[n],
            b: boundary.b,
            b_t: boundary.b_t,
        }
    }
}

/// Pointwise maxima of `|u|`, `|u_x|`, `|u_t|` after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepNorms {
    pub t: f64,
    pub max_abs_u: f64,
    pub max_abs_ux: f64,
    pub max_abs_ut: f64,
}

impl StepNorms {
    fn new(state: &FieldState) -> Self {
        StepNorms {
            t: state.t,
            max_abs_u: state.max_abs_u(),
            max_abs_ux: state.max_abs_w(),
            max_abs_ut: state.max_abs_v(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Trajectory {
    pub states: Vec<FieldState>,
    /// Index into the per-step records for each snapshot.
    pub snapshot_steps: Vec<usize>,
    pub boundary_trace: Vec<BoundaryRecord>,
    pub norms: Vec<StepNorms>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.norms.iter().map(|n| n.t).collect()
    }
}

/// Reusable one-step integrator bound to a profile and parameters.
pub struct Stepper<'a> {
    profile: &'a StationaryProfile,
    params: &'a PipeParams,
    dx: f64,
    /// `F_tilde(ubar, ubar_x, 0) / (a^2 - ubar^2)` per node.
    stationary_forcing: Vec<f64>,
    guard: f64,
    mid_v: Vec<f64>,
    mid_w: Vec<f64>,
    mid_u: Vec<f64>,
    source: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(profile: &'a StationaryProfile, params: &'a PipeParams) -> Result<Self> {
        let n = profile.len();
        if n < 3 {
            return Err(Error::InsufficientData(
                "grid needs at least three nodes".into(),
            ));
        }
        let a2 = params.sound_speed * params.sound_speed;
        let stationary_forcing = profile
            .ubar
            .iter()
            .zip(&profile.ubar_x)
            .map(|(&ub, &ubx)| {
                let denom = a2 - ub * ub;
                if denom <= 0.0 {
                    Err(Error::domain(
                        "Stepper::new",
                        format!("stationary state {ub} is not subsonic"),
                    ))
                } else {
                    Ok(f_tilde(ub, ubx, 0.0, params.friction) / denom)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Stepper {
            profile,
            params,
            dx: profile.xs[1] - profile.xs[0],
            stationary_forcing,
            guard: params.sound_speed,
            mid_v: vec![0.0; n - 1],
            mid_w: vec![0.0; n - 1],
            mid_u: vec![0.0; n - 1],
            source: vec![0.0; n],
        })
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    fn forcing(&self, i: usize, u: f64, ux: f64, ut: f64) -> f64 {
        let a2 = self.params.sound_speed * self.params.sound_speed;
        let ub = self.profile.ubar[i];
        let c = ub + u;
        f_tilde(c, ux + self.profile.ubar_x[i], ut, self.params.friction)
            - (a2 - c * c) * self.stationary_forcing[i]
    }

    /// Largest characteristic speed `max |ubar + u| + a`.
    pub fn max_speed(&self, state: &FieldState) -> f64 {
        state
            .u
            .iter()
            .zip(&self.profile.ubar)
            .fold(0.0_f64, |m, (&u, &ub)| m.max((ub + u).abs()))
            + self.params.sound_speed
    }

    /// CFL-limited step size for `state`.
    pub fn stable_dt(&self, state: &FieldState, cfl: f64) -> f64 {
        cfl * self.dx / self.max_speed(state)
    }

    /// Advances `state` by `dt`; `boundary` is the disturbance at the new
    /// time level.
    pub fn step(
        &mut self,
        state: &mut FieldState,
        boundary: BoundarySample,
        dt: f64,
    ) -> Result<()> {
        let courant = dt * self.max_speed(state) / self.dx;
        if courant > 1.0 + 1e-12 {
            return Err(Error::Cfl {
                t: state.t,
                courant,
            });
        }
        let n = state.len();
        let last = n - 1;
        let a = self.params.sound_speed;
        let a2 = a * a;
        let k = self.params.gain;
        let r = dt / self.dx;
        let FieldState { u, v, w, .. } = &*state;
        let ubar = &self.profile.ubar;

        for i in 0..n {
            self.source[i] = self.forcing(i, u[i], w[i], v[i]);
        }

        // predictor at midpoints, time level n + 1/2
        for j in 0..last {
            let c = 0.5 * (ubar[j] + ubar[j + 1] + u[j] + u[j + 1]);
            let d = a2 - c * c;
            let dv = v[j + 1] - v[j];
            let dw = w[j + 1] - w[j];
            let vm = 0.5 * (v[j] + v[j + 1]);
            self.mid_v[j] = vm - 0.5 * r * (2.0 * c * dv - d * dw)
                + 0.25 * dt * (self.source[j] + self.source[j + 1]);
            self.mid_w[j] = 0.5 * (w[j] + w[j + 1]) + 0.5 * r * dv;
            self.mid_u[j] = 0.5 * (u[j] + u[j + 1]) + 0.5 * dt * vm;
        }

        let mut v_new = vec![0.0; n];
        let mut w_new = vec![0.0; n];

        // corrector at interior nodes
        for i in 1..last {
            let u_half = 0.5 * (self.mid_u[i - 1] + self.mid_u[i]);
            let v_half = 0.5 * (self.mid_v[i - 1] + self.mid_v[i]);
            let w_half = 0.5 * (self.mid_w[i - 1] + self.mid_w[i]);
            let c = ubar[i] + u_half;
            let d = a2 - c * c;
            let dv = self.mid_v[i] - self.mid_v[i - 1];
            let dw = self.mid_w[i] - self.mid_w[i - 1];
            let s = self.forcing(i, u_half, w_half, v_half);
            v_new[i] = v[i] - r * (2.0 * c * dv - d * dw) + dt * s;
            w_new[i] = w[i] + r * dv;
        }

        // x = 0: outgoing characteristic v + (a + c) w moves with c - a < 0
        {
            let c = ubar[0] + u[0];
            let lam = c - a;
            let l2 = a + c;
            let riem = v[0] + l2 * w[0];
            let riem_next = v[1] + l2 * w[1];
            let target = riem - r * lam * (riem_next - riem) + dt * self.source[0];
            v_new[0] = target / (1.0 + l2 * k);
            w_new[0] = k * v_new[0];
        }
        // x = L: outgoing characteristic v - (a - c) w moves with c + a > 0
        {
            let c = ubar[last] + u[last];
            let lam = c + a;
            let l2 = a - c;
            let riem = v[last] - l2 * w[last];
            let riem_prev = v[last - 1] - l2 * w[last - 1];
            let target = riem - r * lam * (riem - riem_prev) + dt * self.source[last];
            v_new[last] = boundary.b_t;
            w_new[last] = (v_new[last] - target) / l2;
        }

        let t_new = state.t + dt;
        let mut max_u: f64 = 0.0;
        for ((u, v_old), v) in state.u.iter_mut().zip(&state.v).zip(&v_new) {
            *u += 0.5 * dt * (v_old + v);
            max_u = max_u.max(u.abs());
        }
        state.v = v_new;
        state.w = w_new;
        state.t = t_new;

        if !max_u.is_finite() || state.v.iter().chain(&state.w).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t: t_new });
        }
        if max_u > self.guard {
            return Err(Error::BlowUp {
                t: t_new,
                max_abs_u: max_u,
                guard: self.guard,
            });
        }
        Ok(())
    }
}

/// One step of the closed-loop scheme; see [`Stepper::step`].
pub fn step(
    state: &FieldState,
    profile: &StationaryProfile,
    params: &PipeParams,
    boundary: BoundarySample,
    dt: f64,
) -> Result<FieldState> {
    let mut next = state.clone();
    Stepper::new(profile, params)?.step(&mut next, boundary, dt)?;
    Ok(next)
}

/// Integrates from `initial` to `config.t_end`, calling `observer` with the
/// state and boundary sample at `t = 0` and after every step.
pub fn simulate_with<F>(
    initial: FieldState,
    profile: &StationaryProfile,
    params: &PipeParams,
    disturbance: &DisturbanceSpec,
    config: &SolverConfig,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&FieldState, &BoundarySample),
{
    config.validate()?;
    if initial.len() != profile.len() {
        return Err(Error::InsufficientData(
            "initial state and profile grids differ".into(),
        ));
    }
    let mut stepper =
        Stepper::new(profile, params)?.with_guard(config.guard.unwrap_or(params.sound_speed));
    let mut state = initial;
    let mut traj = Trajectory::default();

    let record = |state: &FieldState, traj: &mut Trajectory, observer: &mut F| {
        let boundary = sample_b(disturbance, state.t);
        traj.boundary_trace
            .push(BoundaryRecord::new(state, boundary));
        traj.norms.push(StepNorms::new(state));
        observer(state, &boundary);
    };
    record(&state, &mut traj, &mut observer);
    traj.states.push(state.clone());
    traj.snapshot_steps.push(0);

    let t_end = config.t_end;
    let eps = 1e-12 * t_end.max(1.0);
    let mut snapshot_index = 1_u64;
    let mut next_snapshot = (config.snapshot_dt).min(t_end);
    while state.t < t_end - eps {
        let mut dt = stepper.stable_dt(&state, config.cfl);
        let mut t_target = state.t + dt;
        if t_target >= next_snapshot - eps {
            t_target = next_snapshot;
            dt = next_snapshot - state.t;
        }
        let boundary = sample_b(disturbance, t_target);
        stepper.step(&mut state, boundary, dt)?;
        state.t = t_target;
        record(&state, &mut traj, &mut observer);

        if state.t >= next_snapshot - eps {
            traj.states.push(state.clone());
            traj.snapshot_steps.push(traj.norms.len() - 1);
            snapshot_index += 1;
            next_snapshot = (snapshot_index as f64 * config.snapshot_dt).min(t_end);
        }
    }
    Ok(traj)
}

pub fn simulate(
    initial: FieldState,
    profile: &StationaryProfile,
    params: &PipeParams,
    disturbance: &DisturbanceSpec,
    config: &SolverConfig,
) -> Result<Trajectory> {
    simulate_with(initial, profile, params, disturbance, config, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::{build_stationary, uniform_grid};

    fn params() -> PipeParams {
        PipeParams::new(1.0, 2.0, 0.1, 4.0).unwrap()
    }

    #[test]
    fn f_tilde_hand_values() {
        assert_eq!(f_tilde(0.5, 0.0, 0.0, 3.0), 0.0);
        assert_eq!(f_tilde(1.0, 1.0, 1.0, 0.0), -4.0);
        assert_eq!(f_tilde(1.0, 1.0, 0.0, 2.0), -5.0);
    }

    #[test]
    fn f_vanishes_at_equilibrium() {
        let p = params();
        let prof = build_stationary(&p, 0.3, &uniform_grid(1.0, 20)).unwrap();
        for i in 0..prof.len() {
            assert_eq!(lower_order_f(&prof, i, 0.0, 0.0, 0.0, &p).unwrap(), 0.0);
        }
        assert!(lower_order_f_pointwise(2.0, 0.1, 0.0, 0.0, 0.0, &p).is_err());
    }

    #[test]
    fn riemann_invariant_values() {
        let r = riemann_invariants(1.0, 0.0, 3.0).unwrap();
        assert_eq!((r.r_plus, r.r_minus, r.velocity), (0.0, 0.0, 0.0));
        let r = riemann_invariants(4.0, 2.0, 1.0).unwrap();
        let l4 = 4.0_f64.ln();
        assert!((r.velocity - 0.5).abs() < 1e-15);
        assert!((r.r_plus - (-0.5 - l4)).abs() < 1e-15);
        assert!((r.r_minus - (-0.5 + l4)).abs() < 1e-15);
        assert!(riemann_invariants(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_state_stays_zero() {
        let p = params();
        let xs = uniform_grid(1.0, 64);
        let prof = build_stationary(&p, 0.02, &xs).unwrap();
        let s0 = FieldState::zeros(&xs);
        let s1 = step(&s0, &prof, &p, BoundarySample::default(), 1e-3).unwrap();
        assert!(s1.max_abs_u() == 0.0 && s1.max_abs_v() == 0.0 && s1.max_abs_w() == 0.0);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let p = params();
        let xs = uniform_grid(1.0, 64);
        let prof = build_stationary(&p, 0.02, &xs).unwrap();
        let s0 = FieldState::zeros(&xs);
        let err = step(&s0, &prof, &p, BoundarySample::default(), 0.1).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
    }

    #[test]
    fn blow_up_guard_trips() {
        let p = params();
        let xs = uniform_grid(1.0, 64);
        let prof = build_stationary(&p, 0.02, &xs).unwrap();
        let init = InitialData::Bump {
            amplitude: 0.5,
            center: 0.5,
            width: 0.2,
        }
        .to_state(&xs);
        let cfg = SolverConfig {
            nx: 64,
            cfl: 0.45,
            t_end: 1.0,
            snapshot_dt: 0.5,
            guard: Some(0.1),
        };
        let err = simulate(init, &prof, &p, &DisturbanceSpec::zero(1.0, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::BlowUp { t, .. } if t >= 0.0));
    }

    #[test]
    fn feedback_law_is_exact_and_snapshots_land_on_cadence() {
        let p = params();
        let xs = uniform_grid(1.0, 100);
        let prof = build_stationary(&p, 0.02, &xs).unwrap();
        let init = InitialData::Bump {
            amplitude: 1e-3,
            center: 0.4,
            width: 0.2,
        }
        .to_state(&xs);
        let cfg = SolverConfig {
            nx: 100,
            cfl: 0.45,
            t_end: 1.0,
            snapshot_dt: 0.25,
            guard: None,
        };
        let traj = simulate(init, &prof, &p, &DisturbanceSpec::zero(1.0, 1.0), &cfg).unwrap();
        for rec in &traj.boundary_trace[1..] {
            assert!((rec.ux_0 - p.gain * rec.ut_0).abs() <= 1e-15 * rec.ut_0.abs().max(1e-300));
        }
        let snaps: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
        assert_eq!(snaps, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(traj.states[0].compatibility_defect() < 1e-3 * 1e-3 / 0.04 * 50.0);
    }

    #[test]
    fn bump_is_smooth_and_compact() {
        assert_eq!(bump(1.0, 0.5, 0.5), (0.0, 0.0));
        let (v, d) = bump(0.5, 0.5, 0.25);
        assert_eq!((v, d), (1.0, 0.0));
        let h = 1e-6;
        let (_, d) = bump(0.6, 0.5, 0.25);
        let fd = (bump(0.6 + h, 0.5, 0.25).0 - bump(0.6 - h, 0.5, 0.25).0) / (2.0 * h);
        assert!((d - fd).abs() < 1e-6);
        assert!(InitialData::Bump {
            amplitude: 1.0,
            center: 0.1,
            width: 0.2
        }
        .validate(1.0)
        .is_err());
    }
}
