use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument landed on (or within 1e-12 of) a pole or a lattice point.
    #[error("domain error in {func}: argument {at} is within {distance:.3e} of a singular point")]
    Domain {
        func: &'static str,
        at: Complex64,
        distance: f64,
    },

    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("branch datum does not match the spectral point: {0}")]
    InconsistentBranch(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("pole-proximity guard tripped at t = {t} (separation {distance:.3e})")]
    PoleProximity { t: f64, distance: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("Newton iteration failed: {0}")]
    Newton(String),

    #[error("singular two-form: {0}")]
    SingularForm(String),

    #[error("sign calibration failed: {0}")]
    Calibration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, at: Complex64, distance: f64) -> Self {
        Error::Domain { func, at, distance }
    }

    /// Process exit code: 1 for usage/config problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::InvalidLattice(_) => 1,
            _ => 2,
        }
    }
}
