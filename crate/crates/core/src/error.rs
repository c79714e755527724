use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the range an operation accepts.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The operation is not defined for this class, process or family.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A model's prediction does not fit the loss it is evaluated with.
    #[error("incompatible model and loss: {0}")]
    Incompatible(String),

    /// A theorem's own hypothesis is violated by the inputs.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// The scenario solver could not reach a point satisfying every sampled
    /// constraint with the requested margin.
    #[error("no feasible point found; best residual max_i f(x_i, theta) + margin = {best_residual:.6e}")]
    Infeasible {
        best_residual: f64,
        best_theta: Vec<f64>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {value}")))
    }
}
