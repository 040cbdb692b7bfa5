use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shadow index {i} out of range for a {k}-graph")]
    ShadowRange { i: usize, k: usize },
    #[error("degree index {i} out of range 1..={max}")]
    DegreeRange { i: usize, max: usize },
    #[error("operation needs a nonempty family")]
    EmptyFamily,
    #[error("non-uniform contraction: edges lose different numbers of vertices")]
    NonUniformContraction,
    #[error("edge {edge:?} has {got} vertices, expected {k}")]
    EdgeSize { edge: Vec<u32>, got: usize, k: usize },
    #[error("vertex {vertex} outside the universe 0..{n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("edge {0:?} repeats a vertex")]
    RepeatedVertex(Vec<u32>),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<u32>),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("no cross-cut exists")]
    NoCrossCut,
    #[error("not a hypertree")]
    NotHypertree,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal verification failed: {0}")]
    Verification(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("dichotomy inconclusive: best exactly-once fraction {best_fraction:.4} < {required:.4} and no type-1 piece")]
    DichotomyInconclusive {
        best_fraction: f64,
        required: f64,
        max_pair_codegree: usize,
    },
    #[error("container tree stalled at a node with {edges} edges")]
    NoProgress { edges: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
