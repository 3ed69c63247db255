use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("duplicate keyword `{0}`")]
    DuplicateKeyword(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("empty input")]
    EmptyInput,
    #[error("window of {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("alphabet size {0} outside [2, 26]")]
    InvalidAlphabet(usize),
    #[error("cannot split {len} samples into {segments} segments")]
    InvalidSegmentation { len: usize, segments: usize },
    #[error("embedding error: {0}")]
    Embedding(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid k = {k} for {n} rows")]
    InvalidK { k: usize, n: usize },
    #[error("undefined score: {0}")]
    UndefinedScore(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
