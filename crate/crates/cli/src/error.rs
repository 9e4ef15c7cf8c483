use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}{}: {msg}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse {
        path: String,
        line: Option<usize>,
        msg: String,
    },
    #[error("{path}{}: {msg}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Invalid {
        path: String,
        line: Option<usize>,
        msg: String,
    },
    #[error(transparent)]
    Core(#[from] spreadmod::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use spreadmod::Error as E;
        match self {
            CliError::Core(E::ResolutionTruncated { .. } | E::HomMatrixSingular(_)) => EXIT_UNDECIDED,
            CliError::Core(E::NotTypeA | E::UnknownInvariant(_) | E::TooLarge(_) | E::CapExceeded(_)) => {
                EXIT_UNSUPPORTED
            }
            _ => EXIT_INVALID,
        }
    }
}
