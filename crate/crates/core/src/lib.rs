//! Quantum-walk transport on chains of star graphs.
//!
//! A discrete-time walk on directed edge states is run on two- and
//! three-star chains, reduced to the small invariant subspace the dynamics
//! actually explores, and analyzed spectrally to predict when the walker
//! localizes on the START-END paths. The `experiments` module turns those
//! pieces into reproducible runs, parameter sweeps, and scaling fits; the
//! `starwalk` binary exposes them on the command line.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod reduced;
pub mod spectral;
pub mod tolerances;
pub mod walk;

pub use error::{Error, Result};

/// Version string stamped into every output file's metadata block.
pub const TOOL_VERSION: &str = concat!("starwalk ", env!("CARGO_PKG_VERSION"));
