use thiserror::Error;

use crate::graph::VertexId;
use crate::lattice::Coord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {1} is not a neighbor of {0}")]
    NotAdjacent(VertexId, VertexId),
    #[error("vertex {0} appears twice in the measurement sequence")]
    DuplicateVertex(VertexId),
    #[error("{qubits} qubits exceed the simulation cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },
    #[error("outcome has probability {probability:.3e}")]
    ImpossibleOutcome { probability: f64 },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("coordinate {0} is outside the grid")]
    OffGrid(Coord),
    #[error("no path from {from} to {to}")]
    NoPath { from: Coord, to: Coord },
    #[error("footprint blocked at {0}")]
    Space(Coord),
    #[error("no room: {0}")]
    NoRoom(String),
    #[error("merge precondition violated by edge {0}-{1}")]
    MergePrecondition(VertexId, VertexId),
    #[error("vertex at {0} does not have the required degree")]
    Degree(Coord),
    #[error("endpoints adjacent to {0} leave no routing room")]
    Adjacency(Coord),
    #[error("planning failed at {element}: {reason}")]
    Planning { element: String, reason: String },
    #[error("invalid request: {0}")]
    Request(String),
    #[error("executed graph differs from the prediction: {0}")]
    PredictionMismatch(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn planning(element: impl Into<String>, reason: impl ToString) -> Self {
        Error::Planning { element: element.into(), reason: reason.to_string() }
    }
}
