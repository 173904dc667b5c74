//! Boundary feedback stabilization of isothermal gas flow in a single pipe
//! with an uncertain outflow.
//!
//! The crate integrates the closed-loop quasilinear wave equation for the
//! velocity perturbation around a subsonic stationary state, evaluates the
//! Lyapunov functionals of the decay analysis, and checks the resulting
//! exponential decay certificate on concrete runs.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod disturbance;
pub mod dynamics;
pub mod error;
pub mod lambert;
pub mod lyapunov;
pub mod quadrature;
pub mod scenario;
pub mod stationary;

pub use certificate::{
    compute_constants, gronwall_bound, linear_rate_mu0, verify_decay_bounds,
    verify_gronwall_discrete, CertificateReport, TheoremConstants, Verdict,
};
pub use disturbance::{
    sample_b, verify_noise_bound, BoundarySample, DisturbanceFamily, DisturbanceSpec,
};
pub use dynamics::{simulate, step, FieldState, InitialData, SolverConfig, Trajectory};
pub use error::{Error, Result};
pub use lambert::lambert_w_minus1;
pub use lyapunov::{energy_e1, fit_decay_rate, LyapunovTrace};
pub use scenario::{execute, RunOutput, Scenario};
pub use stationary::{
    build_stationary, critical_length, uniform_grid, PipeParams, StationaryProfile,
};
