use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("design matrix is rank deficient: column `{column}` is a linear combination of earlier columns")]
    Collinear { column: String },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("cannot log-transform project {project_id}: {attribute} must be positive")]
    Transform {
        project_id: u32,
        attribute: &'static str,
    },

    #[error("infinite variance inflation factor for `{predictor}` (perfectly collinear with the other predictors)")]
    InfiniteVif { predictor: String },

    #[error("scenario `{label}`: {source}")]
    Scenario {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
