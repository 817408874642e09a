use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {max_deviation:.3e})")]
    NotHermitian { max_deviation: f64 },

    #[error("state vector is not normalized (|norm - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("quadrature window [{lo}, {hi}] excludes required frequency {missing}")]
    QuadratureWindow { lo: f64, hi: f64, missing: f64 },

    #[error("quadrature did not converge after {panels} panels (last change {change:.3e})")]
    QuadratureNotConverged { panels: usize, change: f64 },

    #[error("no diabatic strokes found")]
    NoDiabaticStrokes,

    #[error(
        "trace is not plateau-dominated: {:.1}% of the analyzed span is classifiable as plateau",
        plateau_fraction * 100.0
    )]
    NotPlateauDominated { plateau_fraction: f64 },

    #[error("trace too short for cycle analysis: {0}")]
    InsufficientTrace(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
