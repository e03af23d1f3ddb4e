//! Error type shared by all workbench modules.

use thiserror::Error;

/// Everything that can go wrong in a workbench calculation.
///
/// Variant names are stable identifiers: the CLI reports them verbatim in
/// its JSON summaries.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A†| = {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("charge-basis truncation did not converge (N = {reached}, residual {residual:.3e} GHz)")]
    TruncationNotConverged { reached: usize, residual: f64 },

    #[error("parameters outside the validity regime: {0}")]
    OutOfRegime(String),

    #[error("expression diverges: {0}")]
    Divergent(String),

    #[error("adiabatic state labeling ambiguous (best overlap {overlap:.3})")]
    LabelAmbiguous { overlap: f64 },

    #[error("Hilbert-space dimension {dim} exceeds the supported maximum {max}")]
    DimTooLarge { dim: usize, max: usize },

    #[error("root search did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("field evaluated on the wire (|y| < 1e-12 m)")]
    OnWire,

    #[error("singular network: intermediate magnitude exceeded 1e30")]
    SingularNetwork,

    #[error("syndrome basis vectors are degenerate")]
    DegenerateBasis,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular calibration design (expected {expected} voltages, got {got})")]
    SingularDesign { expected: usize, got: usize },

    #[error("design matrix ill-conditioned (condition number {cond:.3e})")]
    IllConditioned { cond: f64 },

    #[error("preparation set spans rank {rank}, need {need}")]
    RankDeficientPreps { rank: usize, need: usize },

    #[error("unitary is not a phase gate (off-diagonal mass {offdiag_mass:.3e})")]
    NotPhaseGate { offdiag_mass: f64 },
}

impl Error {
    /// Bare variant name, used by the CLI's JSON error reporting.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::InvalidProbability(_) => "InvalidProbability",
            Error::InvalidInput(_) => "InvalidInput",
            Error::TruncationNotConverged { .. } => "TruncationNotConverged",
            Error::OutOfRegime(_) => "OutOfRegime",
            Error::Divergent(_) => "Divergent",
            Error::LabelAmbiguous { .. } => "LabelAmbiguous",
            Error::DimTooLarge { .. } => "DimTooLarge",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DomainError(_) => "DomainError",
            Error::OnWire => "OnWire",
            Error::SingularNetwork => "SingularNetwork",
            Error::DegenerateBasis => "DegenerateBasis",
            Error::Unsupported(_) => "Unsupported",
            Error::SingularDesign { .. } => "SingularDesign",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::RankDeficientPreps { .. } => "RankDeficientPreps",
            Error::NotPhaseGate { .. } => "NotPhaseGate",
        }
    }
}
