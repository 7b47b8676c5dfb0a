use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("every predictor column is constant")]
    AllColumnsConstant,

    /// Cholesky factorization hit a non-positive (or negligible) pivot.
    #[error("singular system: pivot {pivot:e} at position {index} (smallest accepted so far {smallest:e})")]
    SingularSystem {
        index: usize,
        pivot: f64,
        smallest: f64,
    },

    #[error("support of size {size} is too large for n = {n} observations")]
    SupportTooLarge { size: usize, n: usize },

    #[error("coefficient vector has zero norm")]
    ZeroSignal,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("response column `{0}` not found")]
    MissingResponse(String),

    #[error("non-numeric cell {value:?} at row {row}, column `{column}`")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate feature name `{0}` after expansion")]
    DuplicateFeature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerical kernels, as opposed to bad input data
    /// or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::SingularSystem { .. } | Error::SupportTooLarge { .. }
        )
    }
}
