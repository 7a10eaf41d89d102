use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("row index {row} out of range for {n_rows} rows")]
    RowOutOfRange { row: usize, n_rows: usize },
    #[error("column index {col} in row {row} out of range for {n_cols} columns")]
    ColumnOutOfRange { row: usize, col: usize, n_cols: usize },
    #[error("column indices of row {0} are not strictly increasing")]
    UnsortedRow(usize),
    #[error("row {0} contains a non-finite value")]
    NonFinite(usize),
    #[error("row {0} is zero; every equation needs a nonzero coefficient row")]
    ZeroRow(usize),
}

/// Failure while reading a MatrixMarket or plain-text vector file.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid header: {0}")]
    Header(String),
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Self::Syntax { line, msg: msg.into() }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("max_cycles must be at least 1")]
    MaxCycles,
    #[error("variant {variant} requires a window of at least {min}, got {got}")]
    Window {
        variant: &'static str,
        min: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
}

#[derive(Debug, Error)]
pub enum TomoError {
    #[error("grid size must be at least 2, got {0}")]
    GridSize(usize),
    #[error("rays per angle must be at least 1")]
    Rays,
    #[error("no angles given")]
    NoAngles,
    #[error("no ray intersects the grid")]
    Empty,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
