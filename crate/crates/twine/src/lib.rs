//! Parity-network compilation of the quantum Fourier transform onto a
//! linear chain of qubits, with a swap-network baseline, a dense
//! statevector simulator with Pauli noise, process-fidelity scoring and
//! plurality voting over circuit variants.

pub mod bench;
pub mod circuit;
pub mod compiled;
pub mod fowler;
pub mod local;
pub mod noise;
pub mod ptn;
pub mod sim;
pub mod tracker;
pub mod vote;

pub use circuit::{Circuit, CountMode, DepthMode, Gate, Native, Purpose, Tag};
pub use compiled::{CompiledQft, Placement, TargetSet};
pub use tracker::LabelTableau;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("two-qubit gate on non-adjacent qubits {a} and {b}")]
    Adjacency { a: usize, b: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitRange { qubit: usize, n: usize },
    #[error("malformed circuit: {0}")]
    Malformed(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("qubits {0:?} do not hold a single logical value")]
    ImpureFinalState(Vec<usize>),
    #[error("no legal placement for pair ({0}, {1})")]
    Unplaceable(usize, usize),
    #[error("retarget: {0}")]
    Retarget(String),
    #[error("{n} qubits exceeds the simulator limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no state was accepted by the vote")]
    EmptyOutcome,
}
