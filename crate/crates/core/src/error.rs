use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Which of the two SupLORD boost conditions a sequence breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostCondition {
    /// Initial wealth plus the boosts of rejections `1..r*` must not exceed `w₀`.
    InitialPhase,
    /// Every boost from rejection `r*` on must not exceed `b = ε*/C_a(1/δ*)`.
    PerRejection,
    /// Boosts and initial wealth must be nonnegative and finite.
    Nonnegative,
}

impl fmt::Display for BoostCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoostCondition::InitialPhase => "initial-phase budget (beta0 + boosts before r* <= w0)",
            BoostCondition::PerRejection => "per-rejection cap (boost from r* on <= eps*/C)",
            BoostCondition::Nonnegative => "nonnegativity",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("boost sequence violates {condition}: excess {excess:e}")]
    BoostViolation { condition: BoostCondition, excess: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invariant violated at step {step}: {detail}")]
    Invariant { step: usize, detail: String },

    #[error("stream index {index}: {source}")]
    Stream {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Domain(_) => "domain",
            Error::Infeasible(_) => "infeasible",
            Error::BoostViolation { .. } => "boost_violation",
            Error::Numerical(_) => "numerical",
            Error::Invariant { .. } => "invariant",
            Error::Stream { source, .. } => source.kind(),
            Error::Csv { .. } => "csv",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
