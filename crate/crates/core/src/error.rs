use thiserror::Error;

/// Errors raised by the numerical kernels and the scenario pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// A configuration or model parameter violates its constraint.
    /// `key` names the parameter, `constraint` the violated condition.
    #[error("invalid parameter `{key}`: requires {constraint}")]
    InvalidParameter { key: String, constraint: String },

    #[error("CFL condition violated at t = {t}: courant number {courant} > 1")]
    Cfl { t: f64, courant: f64 },

    #[error("blow-up guard tripped at t = {t}: max |u| = {max_abs_u} exceeds {guard}")]
    BlowUp { t: f64, max_abs_u: f64, guard: f64 },

    #[error("non-finite value in the solution at t = {t}")]
    NonFinite { t: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
