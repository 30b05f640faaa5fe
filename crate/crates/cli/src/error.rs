use std::fmt;
use std::process::ExitCode;

/// Failure classes and their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// `--strict` aborted on a per-swing failure.
    Strict = 1,
    Usage = 2,
    Input = 3,
    Pipeline = 4,
    Io = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Failure,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(kind: Failure, error: impl Into<anyhow::Error>) -> Self {
        CliError {
            kind,
            error: error.into(),
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        CliError::new(Failure::Usage, anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tags a fallible call with its failure class.
pub trait Classify<T> {
    fn or_fail(self, kind: Failure) -> CliResult<T>;

    fn input(self) -> CliResult<T>
    where
        Self: Sized,
    {
        self.or_fail(Failure::Input)
    }

    fn pipeline(self) -> CliResult<T>
    where
        Self: Sized,
    {
        self.or_fail(Failure::Pipeline)
    }

    fn io(self) -> CliResult<T>
    where
        Self: Sized,
    {
        self.or_fail(Failure::Io)
    }
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn or_fail(self, kind: Failure) -> CliResult<T> {
        self.map_err(|e| CliError::new(kind, e))
    }
}
