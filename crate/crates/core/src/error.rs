use crate::spatial_index::IndexError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty instance")]
    EmptyInstance,
    #[error("cannot insert into an empty tour")]
    EmptyTour,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid solution: {0}")]
    Solution(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
