//! Countable mixtures of Markov chains and of i.i.d. sequences, hidden Markov models with
//! recurrent underlying chains, and executable conversions between them.
//!
//! The crate is organized by concern:
//!
//! - [`model`]: the four model classes, validation, JSON files and exact finite-horizon laws.
//! - [`exact_law`]: [`FiniteLaw`] tables and total-variation comparisons.
//! - [`sim`]: seeded trajectory sampling and empirical laws.
//! - [`chain`]: recurrence classes, stationary laws, Cesàro limits.
//! - [`constructions`]: mixture ⇄ HMM conversions.
//! - [`successors`]: successors arrays of trajectories.
//! - [`recovery`]: law-of-large-numbers recovery of mixing measures and permutation tests.
//! - [`stopping`]: exact and Monte Carlo checks of hitting-time identities for HMMs.

pub mod chain;
pub mod config;
pub mod constructions;
pub mod error;
pub mod exact_law;
pub mod model;
pub mod recovery;
pub mod rng;
pub mod sim;
pub mod stopping;
pub mod successors;

pub use config::Config;
pub use error::{Error, Result};
pub use exact_law::FiniteLaw;
pub use rng::RandomSource;
