use thiserror::Error;

/// Construction and level-access failures for [`crate::BratteliDiagram`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("diagram has no levels")]
    EmptyDiagram,
    #[error("level {level} has no vertices")]
    EmptyLevel { level: usize },
    #[error("root level must be a single vertex, found {size}")]
    NonUnitalRoot { size: usize },
    #[error("{levels} levels need {} matrices, found {matrices}", levels - 1)]
    MatrixCount { levels: usize, matrices: usize },
    #[error("matrix {step} has ragged rows")]
    RaggedMatrix { step: usize },
    #[error("matrix {step} should be {}x{}, found {}x{}", expected.0, expected.1, found.0, found.1)]
    ShapeMismatch {
        step: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("vertex {vertex} at level {level} has no incoming edge")]
    ZeroRow { level: usize, vertex: usize },
    #[error("stationary tail matrix must be square, found {rows}x{cols}")]
    NonSquareTail { rows: usize, cols: usize },
    #[error("stationary tail requires at least one matrix")]
    TailWithoutMatrix,
    #[error("level {level} is beyond the prefix (last level {last}) and there is no stationary tail")]
    LevelOutOfRange { level: usize, last: usize },
    #[error("kept levels must be strictly increasing")]
    UnsortedKeepList,
    #[error("kept levels must start with the root level 0")]
    MissingRoot,
    #[error("bad generator parameter: {0}")]
    BadParam(String),
}
