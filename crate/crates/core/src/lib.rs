//! Constructive Lovász Local Lemma toolkit.
//!
//! * [`events`]: product spaces, scoped events, atomic permutation events.
//! * [`bounds`]: Shearer measure, cluster-expansion checks and the
//!   MT-distribution bound calculators (Ψ/θ, Ψ′/θ′, disjunction, singleton,
//!   n.i.b.).
//! * [`mt`]: the variable-assignment Moser-Tardos algorithm driven by a
//!   resampling table, plus witness DAG diagnostics.
//! * [`swap`]: the permutation Swapping Algorithm and witness trees.

pub mod bounds;
pub mod error;
pub mod events;
pub mod mt;
pub mod rng;
pub mod swap;
mod trueset;

pub use error::{Error, Result};
pub use events::{Assignment, AtomicPermEvent, Event, Permutation, ScopedEvent, Setting, VarSpace};
pub use rng::RngStream;
pub use trueset::SelectionRule;
