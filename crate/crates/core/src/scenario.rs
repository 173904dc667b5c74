//! End-to-end pipeline: stationary profile, closed-loop simulation, energy
//! series, disturbance certificate, and the decay report.

use serde::Serialize;

use crate::certificate::{
    assemble_report, check_hypotheses, compute_constants, verify_decay_bounds, CertificateReport,
};
use crate::disturbance::{sample_b, verify_noise_bound, DisturbanceSpec, NoiseReport};
use crate::dynamics::{simulate_with, InitialData, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::lyapunov::{fit_decay_rate, DecayFit, LyapunovRecorder, LyapunovTrace};
use crate::stationary::{build_stationary, uniform_grid, PipeParams, StationaryProfile};

/// A fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub params: PipeParams,
    /// Stationary inflow velocity `ubar(0)`.
    pub u0: f64,
    pub disturbance: DisturbanceSpec,
    pub initial: InitialData,
    pub solver: SolverConfig,
    pub lambda: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.solver.validate()?;
        self.initial.validate(self.params.length)?;
        self.disturbance.validate()?;
        if !(self.lambda > 0.5 && self.lambda < 1.0) {
            return Err(Error::param("certificate.lambda", "1/2 < lambda < 1"));
        }
        if !(self.solver.t_end > self.disturbance.t_period) {
            return Err(Error::param("solver.t_end", "t_end > disturbance.T_period"));
        }
        let start = sample_b(&self.disturbance, 0.0);
        let scale = self.disturbance.amplitude.abs().max(1.0);
        if [start.b, start.b_t, start.b_tt]
            .iter()
            .any(|v| v.abs() > 1e-12 * scale)
        {
            return Err(Error::param("disturbance", "b(0) = b_t(0) = b_tt(0) = 0"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.params.length, self.solver.nx)
    }

    pub fn profile(&self) -> Result<StationaryProfile> {
        build_stationary(&self.params, self.u0, &self.grid())
    }

    /// Disturbance with its horizon tied to the solver's final time.
    fn disturbance(&self) -> DisturbanceSpec {
        DisturbanceSpec {
            horizon: self.solver.t_end,
            ..self.disturbance.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutput {
    pub profile: StationaryProfile,
    pub trajectory: Trajectory,
    pub lyapunov: LyapunovTrace,
    pub noise: NoiseReport,
    pub report: CertificateReport,
    /// Least-squares decay rate of `E` after the start-up transient.
    pub fitted: Option<DecayFit>,
}

pub fn execute(scenario: &Scenario) -> Result<RunOutput> {
    scenario.validate()?;
    let params = scenario.params;
    let disturbance = scenario.disturbance();
    let profile = scenario.profile()?;
    let initial = scenario.initial.to_state(&profile.xs);

    let mut recorder = LyapunovRecorder::new();
    let trajectory = simulate_with(
        initial,
        &profile,
        &params,
        &disturbance,
        &scenario.solver,
        |state, _| recorder.record(state, &profile, &params),
    )?;
    let t_period = disturbance.t_period;
    let lyapunov = recorder.finish(t_period);

    let b: Vec<f64> = trajectory.boundary_trace.iter().map(|r| r.b).collect();
    let b_t: Vec<f64> = trajectory.boundary_trace.iter().map(|r| r.b_t).collect();
    let noise = verify_noise_bound(
        &lyapunov.times,
        &b,
        &b_t,
        t_period,
        disturbance.nu,
        disturbance.c_nu,
    )?;

    let constants = compute_constants(&params, scenario.lambda, disturbance.nu, disturbance.c_nu)?;
    let hypotheses = check_hypotheses(&trajectory, &profile, &params, &constants, &noise);
    let bounds = verify_decay_bounds(&lyapunov, &constants, disturbance.quiet_final_window())?;
    let report = assemble_report(constants, hypotheses, bounds, t_period);
    let fitted = fit_energy_decay(&lyapunov, scenario.solver.t_end).ok();

    Ok(RunOutput {
        profile,
        trajectory,
        lyapunov,
        noise,
        report,
        fitted,
    })
}

/// Fits the decay rate of `E` on `[1.5 T_period, T]`, skipping the window
/// start-up and the disturbance ramp.
pub fn fit_energy_decay(trace: &LyapunovTrace, t_end: f64) -> Result<DecayFit> {
    let (times, values): (Vec<f64>, Vec<f64>) = trace
        .times
        .iter()
        .zip(&trace.e)
        .filter_map(|(&t, e)| e.map(|e| (t, e)))
        .unzip();
    fit_decay_rate(&values, &times, (1.5 * trace.t_period, t_end))
}
