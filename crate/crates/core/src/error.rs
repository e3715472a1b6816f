use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the operator calculus.
///
/// Variants split into three classes that callers (notably the CLI) map to
/// distinct exit codes: validation problems (bad inputs), analytic negatives
/// (the mathematics answered "no"), and numerical failures (the computation
/// could not certify its own result).
#[derive(Debug, Clone, Error)]
pub enum Error {
    // -- validation -----------------------------------------------------
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry: {0}")]
    NonFinite(String),

    #[error("validation: {0}")]
    Validation(String),

    // -- analytic negatives ---------------------------------------------
    #[error("matrix is singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("operator is not quotient bounded: seminorm `{seminorm}` has non-invariant null space (residual {residual:.3e}, limit {limit:.3e})")]
    NotQuotientBounded {
        seminorm: String,
        residual: f64,
        limit: f64,
    },

    #[error("radius of boundedness {radius} is not below 1")]
    RadiusNotLessThanOne { radius: f64 },

    #[error("sample point {0} lies in the spectrum")]
    SpectrumHit(Complex64),

    #[error("sample point {0} lies in the local spectrum support")]
    LocalSpectrumHit(Complex64),

    #[error("operators are not quasi-nilpotent equivalent")]
    NotEquivalent,

    // -- numerical failures ----------------------------------------------
    #[error("eigenvalue iteration failed to converge after {iterations} sweeps")]
    ConvergenceFailure { iterations: usize },

    #[error("cluster representatives at distance {distance:.3e} were not merged (separation limit {limit:.3e})")]
    ClusterSeparationFailure { distance: f64, limit: f64 },

    #[error("seminorm power overflowed at exponent {at_power}")]
    Overflow { at_power: usize },

    #[error("series terms grew for {consecutive} consecutive indices (divergence at term {at_term})")]
    DivergenceDetected { at_term: usize, consecutive: usize },

    #[error("bracket recurrence disagrees with direct binomial sum at n={n} (residual {residual:.3e}, limit {limit:.3e})")]
    BracketMismatch { n: usize, residual: f64, limit: f64 },

    #[error("equivalence decision disagrees with the semisimple-part oracle")]
    OracleDisagreement,
}

/// Error classes used for CLI exit-code discipline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: parse failures, dimension mismatches, invalid calibrations.
    Validation,
    /// The analysis ran and answered "no" (not bounded, not equivalent, spectrum hit).
    AnalyticNegative,
    /// The computation could not certify its result.
    NumericalFailure,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            DimensionMismatch(_) | NonFinite(_) | Validation(_) => ErrorClass::Validation,
            SingularMatrix { .. } => ErrorClass::NumericalFailure,
            NotQuotientBounded { .. }
            | RadiusNotLessThanOne { .. }
            | SpectrumHit(_)
            | LocalSpectrumHit(_)
            | NotEquivalent => ErrorClass::AnalyticNegative,
            ConvergenceFailure { .. }
            | ClusterSeparationFailure { .. }
            | Overflow { .. }
            | DivergenceDetected { .. }
            | BracketMismatch { .. }
            | OracleDisagreement => ErrorClass::NumericalFailure,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
