use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// `k²` sits on (or numerically next to) a discrete Dirichlet eigenvalue.
    #[error("near resonance at k = {k}: {detail}")]
    NearResonance { k: f64, detail: String },

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("boundary stencil at ({x:.4}, {y:.4}) leaves the grid")]
    StencilOutsideGrid { x: f64, y: f64 },

    #[error("|xi| = {xi_norm} lies in the evanescent regime for k = {k}")]
    EvanescentSkipped { xi_norm: f64, k: f64 },

    #[error("|xi| = {xi_norm} outside the stable annulus [{lo}, {hi}]")]
    AnnulusViolation { xi_norm: f64, lo: f64, hi: f64 },

    #[error("nonlinearity index m = {0} is not supported here")]
    UnsupportedM(u32),

    #[error("no retained Fourier samples to synthesize")]
    EmptyTable,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors raised by the forward solver rather than by bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NearResonance { .. } | Error::NoConvergence { .. } | Error::NonFinite(_)
        )
    }
}
