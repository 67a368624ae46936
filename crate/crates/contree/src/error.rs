use thiserror::Error;

/// Errors produced by network construction, planning and execution.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("edge {0}: {1}")]
    InvalidEdge(usize, String),

    #[error("cannot contract a vertex with itself (`{0}`)")]
    SelfContraction(String),

    #[error("invalid contraction tree: {0}")]
    InvalidTree(String),

    #[error("leaf/vertex mismatch: {0}")]
    LeafMismatch(String),

    #[error("contraction order step {step}: {reason}")]
    BadOrder { step: usize, reason: String },

    #[error("topological order violated at step {step}: {reason}")]
    BadTopologicalOrder { step: usize, reason: String },

    #[error("vertex `{0}` has no tensor")]
    MissingTensor(String),

    #[error("axis extent mismatch on edge {edge}: {left} vs {right}")]
    ExtentMismatch { edge: usize, left: u64, right: u64 },

    #[error("tensor shape mismatch at vertex `{vertex}`: {reason}")]
    ShapeMismatch { vertex: String, reason: String },

    #[error("{what} exceeds cap ({value} > {cap})")]
    CapExceeded { what: String, value: u128, cap: u128 },

    #[error("cost overflow: {0}")]
    Overflow(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("hyperedges unsupported here: {0}")]
    HyperedgeUnsupported(String),

    #[error("cannot slice edge {0}: {1}")]
    BadSlice(usize, String),

    #[error("gate references qubit {qubit} but the circuit has {qubits} qubits")]
    BadQubit { qubit: usize, qubits: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported conversion: {0}")]
    UnsupportedConversion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for bad input, 3 for a resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}
