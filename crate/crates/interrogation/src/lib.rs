//! Quantum oracle interrogation.
//!
//! An `n`-bit oracle answers membership queries `x -> <x, omega>` about a hidden
//! bit string `omega`. Classically, `k` queries reveal at most `k` bits. A quantum
//! interrogator that spreads its query register over all basis states of Hamming
//! weight at most `k` recovers the entire string with probability `M_k / 2^n`
//! (`M_k` = number of weight-<=-`k` strings), which exceeds 95% already at
//! `k = floor(n/2 + sqrt(n))`.
//!
//! The crate is organized around that experiment:
//!
//! - [`combinatorics`]: exact (arbitrary-precision) query-count arithmetic —
//!   binomial tails, success/error probabilities, query thresholds.
//! - [`walsh`]: in-place fast Walsh-Hadamard transform, sequential and
//!   data-parallel.
//! - [`statevector`]: dense simulation of the interrogation pipeline
//!   (weighted superposition, phase oracle, Hadamard layer, measurement).
//! - [`profile`]: amplitude profiles over Hamming-weight shells and the
//!   expected-correct-bits analytics attached to them.
//! - [`optimizer`]: principal-eigenvector optimization of the amplitude
//!   profile for a fixed query budget.
//!
//! The `parallel` feature (on by default) routes the heavy kernels through
//! rayon; disabling it leaves a sequential implementation with identical
//! results. Both paths perform the same floating-point operations in the same
//! order, so outputs are bit-for-bit identical.

pub mod combinatorics;
pub mod error;
pub mod optimizer;
pub mod profile;
pub mod statevector;
mod sums;
pub mod walsh;

pub use error::{Error, Result};
