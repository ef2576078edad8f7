use thiserror::Error;

/// Errors surfaced by the spectral operators and the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid or mode cutoff is too small for the requested operation.
    #[error("resolution too small: {0}")]
    Resolution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The balayage of the Jacobian density came out nonpositive somewhere,
    /// so its logarithm is undefined; the iterate left the small-data regime.
    #[error("balayage sample {value:.3e} at angle index {index} is not positive")]
    NonPositiveBalayage { value: f64, index: usize },

    /// Exponent magnitude guard tripped before evaluating exp().
    #[error("exponent overflow guard: {0}")]
    OverflowGuard(String),

    /// Power-series tail mass above tolerance; the truncation is too short.
    #[error(
        "power series under-resolved: tail mass {tail:.3e} exceeds {tol:.3e}; \
         a truncation of roughly {suggested} coefficients is needed"
    )]
    UnderResolved { tail: f64, tol: f64, suggested: usize },

    /// The weighted boundary symbol has too much negative-frequency mass, so
    /// no Hardy-class primitive exists for this boundary data.
    #[error("negative-frequency defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    HardyDefect { defect: f64, tol: f64 },

    /// Refusal of a brute-force quadrature whose cost would be unreasonable.
    #[error("workload refused: {0}")]
    WorkloadRefused(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
