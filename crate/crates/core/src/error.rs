use thiserror::Error;

/// Failure modes shared by all modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coverage error: r = {r} outside [{lo}, {hi}]")]
    Coverage { r: f64, lo: f64, hi: f64 },
    #[error("grid too coarse: {count} points, need at least {needed}")]
    GridTooCoarse { count: usize, needed: usize },
    #[error("grid is not uniform")]
    NonUniformGrid,
    #[error("pole of the gamma function at x = {0}")]
    Pole(f64),
    #[error("hypergeometric series diverges at z = 1 (c - a - b = {0})")]
    Divergence(f64),
    #[error("step size collapsed at r = {r} (h = {h:e})")]
    StepCollapse { r: f64, h: f64 },
    #[error("invalid bracket: both endpoints classify as {0}")]
    InvalidBracket(String),
    #[error("sign mixing: right-hand side changes sign on the fit window")]
    SignMixing,
    #[error("non-monotone sign pattern at lambda = {0}")]
    NonMonotone(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by leaving a domain or a sampled range.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Coverage { .. } | Error::Pole(_) | Error::Divergence(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
