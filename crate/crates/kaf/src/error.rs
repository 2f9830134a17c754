use thiserror::Error;

fn fmt_line(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    }
}

/// Crate-wide error type. Variants map onto the process exit codes used by
/// the `kaf` binary: [`Error::Divergence`] exits with code 3, everything else
/// with code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible matrix/tensor shapes; names both operands.
    #[error("shape mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// Invalid hyperparameter or argument value.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Semantically invalid data (label out of range, count mismatch, ...).
    #[error("invalid data: {0}")]
    Data(String),

    /// Malformed file contents; `line` is 1-based where applicable.
    #[error("format error{}: {msg}", fmt_line(line))]
    Format { line: Option<usize>, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch}: loss became non-finite")]
    Divergence { epoch: usize },

    /// API contract violation, e.g. a forward cache replayed against the
    /// wrong layer or gradient buffers out of step with parameters.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid run configuration (unknown key, bad value, bad combination).
    #[error("config error: {0}")]
    Config(String),

    /// A public operation produced a non-finite entry.
    #[error("non-finite value produced by {op}")]
    NonFinite { op: &'static str },
}

impl Error {
    /// Process exit code for the CLI: 2 for config/data problems, 3 for
    /// divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
