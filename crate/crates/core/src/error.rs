use thiserror::Error;

use crate::dist::Party;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {p} for outcome {outcome:?}")]
    NegativeProbability { outcome: Vec<String>, p: String },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("symbol {symbol:?} is not in the alphabet of {variable}")]
    UnknownSymbol { variable: String, symbol: String },
    #[error("outcome {0:?} listed more than once")]
    DuplicateOutcome(Vec<String>),
    #[error("outcome has {got} symbols, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} declared more than once")]
    DuplicateVariable(String),
    #[error("invalid alphabet for {0:?}: must be non-empty with distinct symbols")]
    InvalidAlphabet(String),
    #[error("empty variable selection")]
    EmptySelection,
    #[error("conditioning event {variable} = {symbol} has probability zero")]
    ZeroProbabilityEvent { variable: String, symbol: String },
    #[error("{variable} is owned by {owner:?}, not {party:?}")]
    OwnershipViolation {
        variable: String,
        owner: Party,
        party: Party,
    },
    #[error("local function is undefined on input {0:?}")]
    PartialFunction(Vec<String>),
    #[error("variable groups overlap on {0:?}")]
    OverlappingGroups(String),
    #[error("variable {0:?} is not binary with alphabet [\"0\", \"1\"]")]
    NonBinaryAlphabet(String),
    #[error("channel input alphabet {channel:?} does not match {variable:?}")]
    AlphabetMismatch {
        channel: Vec<String>,
        variable: Vec<String>,
    },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("alphabet of {variable} has {size} symbols, limit is {limit}")]
    AlphabetTooLarge {
        variable: String,
        size: usize,
        limit: usize,
    },
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("information measure evaluated to {0:e}, below the -1e-12 floor")]
    NegativeMeasure(f64),
    #[error("internal check failed: {0}")]
    InternalCheckFailed(String),
    #[error("unknown qubit {0:?}")]
    UnknownQubit(String),
    #[error("control and target are both {0:?}")]
    SameQubit(String),
    #[error("partial transpose subsystem must be a non-empty proper subset of the qubits")]
    EmptyOrFullSubsystem,
    #[error("expected a {expected}-dimensional state, got dimension {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}
