//! Numerical core for f-divergence direct preference optimization.
//!
//! The crate bundles the pieces needed to study preference-optimization
//! losses on finite alphabets:
//!
//! - [`generators`]: a catalog of f-divergence generating functions with
//!   pointwise evaluators for f, f', and (where defined) the inverse of f'.
//! - [`classifier`]: numeric tests deciding whether a generator is
//!   DPO-inducing and whether it is displacement-resistant.
//! - [`simplex`]: exact and iterative solvers for reward-maximization
//!   problems regularized by a full or partial f-divergence penalty.
//! - [`losses`]: DPO, f-DPO, and SquaredPO losses with analytic gradients.
//! - [`trainer`]: a synthetic Bradley-Terry world and a tabular softmax
//!   trainer instrumented for likelihood-displacement statistics.
//! - [`oracle`]: brute-force references (grid search, finite differences)
//!   used to validate the above.
//!
//! Everything here is `no_std` + `alloc`; IO, file formats, and the CLI
//! live in the companion `fdpo-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod generators;

pub use generators::{Distribution, Generator};
