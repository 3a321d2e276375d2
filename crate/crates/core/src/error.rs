use std::path::PathBuf;

use thiserror::Error;

use crate::profile::RadialProfile;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the closed ball of radius {radius}: |p| = {norm}")]
    OutsideDomain { radius: f64, norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no positive solution for lambda = {lambda} outside (0, {lambda1})")]
    NoSolutionInRange { lambda: f64, lambda1: f64 },

    #[error("shooting bracket not found for lambda = {lambda}: {diagnostics}")]
    BracketFailure { lambda: f64, diagnostics: String },

    #[error("linearized operator has an eigenvalue {mu:e} within {tol:e} of zero (sector {ell})")]
    DegenerateLinearization { ell: usize, mu: f64, tol: f64 },

    #[error("grid with {intervals} intervals cannot resolve {requested} eigenvalues")]
    ResolutionError { intervals: usize, requested: usize },

    #[error("Newton stagnated after {} iterations (last residual {:e})", .residual_history.len(), .residual_history.last().copied().unwrap_or(f64::NAN))]
    ConvergenceFailure {
        last_iterate: Box<RadialProfile>,
        residual_history: Vec<f64>,
    },

    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeCountMismatch { expected: String, found: usize },

    #[error("sign certification of f(lambda) failed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    SignCertificationError {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("|1 - 2 v0(xi0)| = {margin:e} is below the reliability threshold {tol:e}")]
    AssumptionV00Violated { margin: f64, tol: f64 },

    #[error("concentration scale {delta} is not below half the radius {radius}")]
    ScaleTooLarge { delta: f64, radius: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureError { tol: f64, estimate: f64 },

    #[error("profile minimum {min} is not negative; nothing to invert")]
    NotBlownUp { min: f64 },

    #[error("branch seeding failed after {} attempts", .attempts.len())]
    SeedFailure { attempts: Vec<String> },

    #[error("continuation stalled at eps = {eps} after {} accepted points", .partial.len())]
    BranchStall {
        eps: f64,
        partial: Vec<crate::branch_tracker::BranchPoint>,
    },

    #[error("rate fit needs {0}")]
    FitError(String),

    #[error("config error: {0}")]
    ConfigError(String),

    #[error("missing prerequisite `{stage}`: {path}")]
    MissingDependency { stage: String, path: PathBuf },

    #[error("inconsistent inputs: {0}")]
    MixedDigest(String),

    #[error("malformed data in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
