use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("signature has no value for edge {0}")]
    MissingSign(EdgeId),
    #[error("record does not match graph: {0}")]
    RecordMismatch(String),
}

/// A malformed line in an SGF or flow file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, message: message.into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("flow has no value for edge {0}")]
    MissingEdge(EdgeId),
    #[error("flow assigns a value to edge {0}, which is not in the graph")]
    ExtraEdge(EdgeId),
    #[error("flows are defined on different edge sets")]
    GraphMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("edge {0} has no admissible value")]
    EmptyAllowedSet(EdgeId),
    #[error("flow bound k must be at least 2, got {0}")]
    InvalidBound(i64),
    #[error("graph is not cubic")]
    NotCubic,
    #[error("graph is not connected")]
    Disconnected,
    #[error("search budget limits must be positive")]
    InvalidBudget,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdmissibilityError {
    #[error("internal inconsistency: circuit-cover says {circuit_cover}, deletion test says {deletion}")]
    Mismatch { circuit_cover: bool, deletion: bool },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget exhausted")]
    Budget,
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoremError {
    #[error("hypothesis failed: the signed graph is not flow-admissible")]
    NotFlowAdmissible,
    #[error("hypothesis failed: the underlying graph admits no nowhere-zero 4-flow")]
    NoFourFlow,
    #[error("graph is not cubic")]
    NotCubic,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge coloring is not a proper 3-edge-coloring")]
    ImproperColoring,
    #[error("blow-up precondition violated: {0}")]
    BlowUp(String),
    #[error("search budget exhausted")]
    Budget,
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<LemmaError> for TheoremError {
    fn from(e: LemmaError) -> TheoremError {
        match e {
            LemmaError::Budget => TheoremError::Budget,
            LemmaError::Graph(g) => TheoremError::Graph(g),
            other => TheoremError::Internal(other.to_string()),
        }
    }
}

impl From<FlowError> for TheoremError {
    fn from(e: FlowError) -> TheoremError {
        TheoremError::Internal(e.to_string())
    }
}

impl From<AdmissibilityError> for TheoremError {
    fn from(e: AdmissibilityError) -> TheoremError {
        TheoremError::Internal(e.to_string())
    }
}

impl From<OracleError> for TheoremError {
    fn from(e: OracleError) -> TheoremError {
        TheoremError::Internal(e.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid family spec: {0}")]
    InvalidSpec(String),
    #[error("rejection sampling gave up after {0} attempts")]
    Exhausted(usize),
}
