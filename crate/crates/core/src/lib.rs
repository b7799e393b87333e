//! Auxiliary-variables Markov chain on integer partitions whose stationary law
//! is the Macdonald measure `pi_{q,t}`, with exact spectral verification.

pub mod characters;
pub mod commands;
pub mod convergence;
pub mod error;
pub mod exact_chain;
pub mod measures;
pub mod partition;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use partition::{Partition, PartitionIndex};
pub use scalar::Rational;
