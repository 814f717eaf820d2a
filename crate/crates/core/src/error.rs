use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// An argument pushed `t^s` past the exponential guard.
    #[error("exponential saturation at t = {t} (t^s = {ts:.1} > {limit})")]
    Saturated { t: f64, ts: f64, limit: f64 },

    #[error("energy never became negative along the ray before t = {t_cap:.4e}")]
    NoNegativeEnergy { t_cap: f64 },

    #[error("line search stalled after {iterations} iterations (grad norm {grad_norm:.3e})")]
    Stalled { iterations: usize, grad_norm: f64 },

    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }
}
