//! Simulation laboratory for the k-party Hidden Matching Problem.
//!
//! * [`model`]: instances, number-on-forehead views, the relation itself.
//! * [`families`]: edge-disjoint perfect matching families and girth-constrained constructions.
//! * [`quantum`]: exact simulation of the fingerprint SMP protocol.
//! * [`classical`]: one-way protocols, exact evaluation, brute-force search, sender derandomization.
//! * [`info`]: entropy toolkit and the extraction experiment.

pub mod bits;
pub mod classical;
pub mod error;
pub mod families;
pub mod graph;
pub mod info;
pub mod lp;
pub mod model;
pub mod quantum;
pub mod seed;

pub use bits::Bits;
pub use error::{HmpError, Result};
pub use families::{Construction, MatchingFamily};
pub use model::{Answer, HmpInstance, PlayerView};
