use std::fmt;

/// Failure classes of the command line, each with its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or schema-invalid configuration.
    Config(String),
    /// A numerical routine or an artifact write failed.
    Numeric(String),
    /// Reports ran but some agreement flag is false.
    Disagreement(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Disagreement(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Disagreement(m) => write!(f, "disagreement: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hamflow::Error> for CliError {
    fn from(e: hamflow::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o: {e}"))
    }
}
