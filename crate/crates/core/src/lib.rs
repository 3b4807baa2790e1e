//! Computational toolkit for shifted exponential sequences a^n - b.
//!
//! The sequence a^n - b is divisible by a prime p whenever
//! n = l(p) (mod ord_p(a)), where l(p) is the discrete logarithm of b to base
//! a mod p. This crate classifies primes by order and power-residue criteria,
//! measures how those congruences cover the integers, evaluates the
//! associated Kummer-extension degree formulas and Lenstra-style density
//! products, computes second-moment statistics of the covering system, and
//! constructs the classical counterexamples showing that fixed-divisor and
//! irreducibility checks on the whole sequence are not sufficient.

pub mod construct;
pub mod covering;
pub mod density;
mod error;
pub mod galois;
pub mod modarith;
pub mod moments;
pub mod primeset;
pub mod sieve;

pub use construct::Counterexample;
pub use covering::{CoverReport, ExponentDomain};
pub use density::DensityEstimate;
pub use error::{Error, Result};
pub use galois::{ConjClass, TripleElement};
pub use modarith::Factorization;
pub use primeset::{Mode, Params, PrimeRecord};
