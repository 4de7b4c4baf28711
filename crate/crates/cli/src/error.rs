use std::fmt;

/// Failure categories with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Guard(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Guard(m) => write!(f, "guard tripped: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<disclose::Error> for CliError {
    fn from(e: disclose::Error) -> Self {
        use disclose::Error as E;
        let msg = e.to_string();
        match e {
            E::SearchSpaceTooLarge { .. } | E::ExactOverflow { .. } => CliError::Guard(msg),
            E::BadParams(_)
            | E::InvalidArgument(_)
            | E::DepthOutOfRange { .. }
            | E::BudgetBelowGroupCount { .. }
            | E::NoGroups
            | E::ExactArithmeticRequired
            | E::IndexOutOfRange { .. } => CliError::Config(msg),
            _ => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
