use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity}: argument {value} outside domain [{lo}, {hi}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("tolerance not met for {quantity}: achieved {achieved:e} with error estimate {estimate:e} against tolerance {tolerance:e}")]
    ToleranceNotMet {
        quantity: String,
        achieved: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("integrand returned {value} at x = {location}")]
    Evaluation { location: f64, value: String },

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("gradient descent diverged with learning rate {learning_rate}: loss {loss:e} exceeds 1e6 x initial loss {initial:e}")]
    Divergence {
        learning_rate: f64,
        loss: f64,
        initial: f64,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("integration box too small: tail estimate {tail:e} exceeds tolerance {tolerance:e}; try |a| <= {suggested_a}")]
    EnlargeBox {
        tail: f64,
        tolerance: f64,
        suggested_a: f64,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from a numerical computation rather than from
    /// how the toolkit was invoked.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::ToleranceNotMet { .. }
                | Error::Evaluation { .. }
                | Error::NotAdmissible(_)
                | Error::Divergence { .. }
                | Error::UndefinedMetric(_)
                | Error::EnlargeBox { .. }
                | Error::LinearAlgebra(_)
                | Error::Precondition(_)
        )
    }
}
