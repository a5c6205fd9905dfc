//! Error types shared across the crate.

use thiserror::Error;

use crate::framework::Stage;

/// Errors raised while building or parsing circuits.
#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("circuit size must be at least 1")]
    InvalidSize,
    #[error("qubit index {index} out of range for circuit with {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("duplicate qubit index {0} in instruction")]
    DuplicateQubit(usize),
    #[error("gate {gate} expects {expected} qubit(s), got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("gate angle must be finite")]
    NonFiniteAngle,
    #[error("box arity must be at least 1")]
    EmptyBox,
    #[error("box name must be a nonempty identifier, got {0:?}")]
    BadBoxName(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Errors raised while building, validating, or parsing hardware targets.
#[derive(Debug, Error)]
pub enum TargetError {
    #[error("target dimensions must be at least 1")]
    InvalidSize,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid {field}: {message}")]
    Invariant {
        field: &'static str,
        message: String,
    },
    #[error("failed to read target file: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors raised by an individual compiler pass.
#[derive(Debug, Error)]
pub enum PassError {
    #[error("circuit has {circuit} qubits but target only has {target}")]
    Capacity { circuit: usize, target: usize },
    #[error("no layout in the property set; run a layout pass first")]
    MissingLayout,
    #[error("qubits {0} and {1} lie in disconnected components of the coupling graph")]
    RoutingInfeasible(usize, usize),
    #[error("no synthesis rule for box {0:?}")]
    UnsupportedBox(String),
    #[error("no translation rule chain into the target basis for gate {0}")]
    Translation(String),
    #[error("no duration available for gate {0}")]
    MissingDuration(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A pass failure, annotated with where in the pipeline it happened.
#[derive(Debug, Error)]
#[error("pass {pass} failed in {stage} stage: {source}")]
pub struct PipelineError {
    pub pass: String,
    pub stage: Stage,
    #[source]
    pub source: PassError,
}

/// Errors raised by the profiler's aggregation and reporting operations.
#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("records mix run ids {0} and {1}; aggregate one run at a time")]
    MixedRunIds(u64, u64),
    #[error("repetition {index} has configuration {found:?}, expected {expected:?}")]
    MismatchedConfiguration {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("share of total is undefined for a zero total time")]
    ZeroTotal,
    #[error("no pass named {0:?} in the registry")]
    UnknownPass(String),
    #[error("need at least one repetition")]
    NoRepetitions,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Errors raised by the statevector simulator and equivalence oracle.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("circuit has {n} qubits, above the {max}-qubit simulator limit")]
    TooLarge { n: usize, max: usize },
    #[error("circuit still contains box instructions; expand them first")]
    UnexpandedBox,
    #[error("circuits have {0} and {1} qubits; equivalence needs matching sizes")]
    QubitCountMismatch(usize, usize),
    #[error("permutation has length {got}, expected {expected}")]
    BadPermutation { got: usize, expected: usize },
}
