//! Order-invariant probability measures on fixed causal sets.
//!
//! * [`poset`]: exact linear-extension combinatorics on finite posets.
//! * [`families`]: lazily evaluated infinite causal sets.
//! * [`measures`]: order-invariant measures and their evaluators.
//! * [`analysis`]: consistency and invariance checkers, simulation, and
//!   empirical tests.
//! * [`cli`]: the batch command-line front end.

pub mod exact;
pub mod poset;
pub mod families;
pub mod measures;
pub mod analysis;
pub mod cli;
