use thiserror::Error;

use crate::scenario::Violation;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid scenario: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("inconsistent inventory records: consumed {consumed} t + remaining {remaining} t exceeds stock {stock} t")]
    InconsistentInventory {
        stock: f64,
        consumed: f64,
        remaining: f64,
    },
    #[error("unknown appearance code `{0}`")]
    UnknownAppearance(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("series has no outflow to reduce")]
    NoFlow,
    #[error("outflow has zero duration; a constant-rate source term is undefined")]
    ZeroDuration,
}

#[derive(Debug, Error, PartialEq)]
pub enum OrificeError {
    /// External pressure dominates; the hole takes in fluid instead.
    #[error("no outflow: external pressure dominates (radicand {radicand})")]
    NoOutflow { radicand: f64 },
    #[error("non-physical pressures: {0}")]
    NonPhysicalPressures(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum TwoStageError {
    #[error("two-stage discharge needs a breach below the waterline")]
    NotSubmerged,
    /// Internal head does not exceed external head; phase 1 is skipped.
    #[error("already at or below hydrostatic equilibrium (radicand {radicand})")]
    AtEquilibrium { radicand: f64 },
    #[error("velocity decay coefficient must be positive, got {0}")]
    DegenerateDecay(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error)]
pub enum CfdError {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("pressure solve did not converge in {iterations} iterations (residual {residual:e}, target {target:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        target: f64,
    },
    #[error("time step {dt} exceeds the stability limit {limit}")]
    TimeStep { dt: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("snapshot format error: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failure classes of a harness run; the CLI maps them to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("model `{model}` cannot run this scenario: {reason}")]
    Pairing { model: String, reason: String },
    #[error("invalid options: {0}")]
    Options(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Orifice(#[from] OrificeError),
    #[error(transparent)]
    TwoStage(#[from] TwoStageError),
    #[error(transparent)]
    Cfd(#[from] CfdError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: malformed summary: {message}")]
    Summary { path: String, message: String },
}

impl HarnessError {
    pub fn kind(&self) -> ErrorKind {
        use ErrorKind::*;
        match self {
            Self::Scenario(ScenarioError::Io { .. }) => Io,
            Self::Scenario(_) | Self::Pairing { .. } | Self::Options(_) => Validation,
            Self::Estimate(EstimateError::NoFlow | EstimateError::ZeroDuration) => Numerical,
            Self::Estimate(_) | Self::Orifice(_) => Validation,
            Self::TwoStage(TwoStageError::DegenerateDecay(_)) => Numerical,
            Self::TwoStage(_) => Validation,
            Self::Cfd(CfdError::NonConvergence { .. } | CfdError::TimeStep { .. }) => Numerical,
            Self::Cfd(CfdError::Io(_) | CfdError::Snapshot(_)) => Io,
            Self::Cfd(_) => Validation,
            Self::Io { .. } | Self::Csv { .. } | Self::Summary { .. } => Io,
        }
    }
}
