//! Adiabatic quantum optimization toolchain: Boolean and QUBO problems,
//! Ising models, Chimera hardware and minor embedding, annealing programs,
//! a state-vector simulation engine and spectral analysis.

pub mod analysis;
pub mod benchmark;
pub mod cli;
pub mod engine;
pub mod error;
pub mod frontend;
pub mod graph;
pub mod hardware;
pub mod ising;
pub mod program;
pub mod store;

pub use error::{Error, Result};
pub use frontend::{Problem, QuboProblem};
pub use graph::{SymmetricMatrix, WeightedGraph};
pub use hardware::{chimera, Embedding, Processor};
pub use ising::{IsingModel, SpinConfiguration};
pub use program::{QuantumProgram, Schedule};
