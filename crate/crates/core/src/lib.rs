//! Unit-commitment toolkit for studying how incentive-based demand response
//! interacts with short-circuit-current adequacy.
//!
//! The crate bundles a grid model with a bolted-fault current oracle, a
//! linear per-bus SCC surrogate trained against that oracle, interruptible
//! and shiftable load blocks, the full unit-commitment MILP with McCormick
//! pair terms, a self-contained simplex / branch-and-bound solver with MPS
//! export, and post-solve adequacy screening and cost reporting.

pub mod analysis;
pub mod dr;
pub mod grid;
pub mod milp;
pub mod mps;
pub mod scenario;
pub mod simplex;
pub mod solver;
pub mod surrogate;
pub mod uc;
