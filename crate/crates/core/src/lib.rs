//! The East kinetically constrained spin model on finite windows.
//!
//! Site `x` may refresh its occupancy only when its right neighbour `x + 1`
//! is empty. Each refresh draws an independent occupancy with probability
//! `p = 1 - q`, so the product Bernoulli measure with vacancy density `q` is
//! reversible.
//!
//! The crate is `no_std` with `alloc`. It provides
//!
//! * configurations, renewal initial laws and time-scale bookkeeping ([`model`], [`renewal`]),
//! * an event-driven simulator built on the graphical construction ([`simulate`]),
//! * exact generators, spectral gaps and functional inequalities over the `2^L` state space ([`exact`]),
//! * reachability under a zero budget ([`reach`]),
//! * limit laws of the coarsening regime ([`limits`]),
//! * replica-level experiments with batch statistics ([`experiments`]).

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact;
pub mod experiments;
pub mod limits;
pub mod linalg;
pub mod model;
pub mod reach;
pub mod renewal;
pub mod rng;
pub mod runner;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use model::{Boundary, Configuration, Interval, ModelParams, TimeScale};
pub use renewal::RenewalLaw;
pub use rng::StreamSeed;
pub use runner::{ReplicaRunner, Sequential};
pub use stats::EstimateCI;
