use cocycle_core::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("budget: {0}")]
    Budget(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Json(_) => EXIT_USAGE,
            LabError::Budget(_) => EXIT_BUDGET,
            LabError::Refused(_) => EXIT_PRECONDITION,
            LabError::Io(_) | LabError::Csv(_) => EXIT_USAGE,
            LabError::Core(e) => match e {
                CoreError::WorkBudgetExceeded { .. } | CoreError::LatticeBudgetExceeded { .. } => EXIT_BUDGET,
                CoreError::InvalidParameter(_)
                | CoreError::DimensionMismatch { .. }
                | CoreError::Resolution { .. }
                | CoreError::Divisibility { .. } => EXIT_USAGE,
                _ => EXIT_PRECONDITION,
            },
        }
    }
}
