use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown curvature preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameters for preset `{preset}`: {reason}")]
    InvalidParams { preset: String, reason: String },

    #[error("invalid interval ({a}, {b}): need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("eps must be positive and finite, got {0}")]
    InvalidEps(f64),

    #[error("inadmissible geometry: eps * sup|kappa| = {eps_sup_kappa} exceeds {limit}")]
    Inadmissible { eps_sup_kappa: f64, limit: f64 },

    #[error("{name} = {value} is outside its domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("curvature profile `{0}` has no derivative")]
    MissingDerivative(String),

    #[error("Robin boundary condition requires an alpha coefficient")]
    MissingAlpha,

    #[error("shift k = {k} violates k > -inf kappa = {bound}")]
    InvalidShift { k: f64, bound: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("factorization breakdown at pivot {pivot} (value {value:e}, shift {sigma})")]
    Breakdown { pivot: usize, value: f64, sigma: f64 },

    #[error("matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigensolver converged {converged} of {wanted} pairs; best residuals {residuals:?}")]
    NonConvergence {
        wanted: usize,
        converged: usize,
        residuals: Vec<f64>,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("root bracketing failed on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("bound-state count unstable under domain doubling: {count} vs {doubled}")]
    UnstableCount { count: usize, doubled: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Failures of the numerics, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Breakdown { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::NonConvergence { .. }
                | Error::Bracketing { .. }
                | Error::UnstableCount { .. }
        )
    }
}
