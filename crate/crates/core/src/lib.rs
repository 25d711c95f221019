//! Exact combinatorics of non-crossing partitions and free cumulants for
//! R-diagonal elements, with desk-scale verification of strong Haagerup
//! and ultracontractivity bounds.
//!
//! The crate is organised bottom-up:
//!
//! - [`partitions`]: the lattice `NC(n)`, Möbius function, Catalan and
//!   Fuss-Catalan counts, multichains.
//! - [`patterns`]: the alternating word `a^n (a*)^n ... ` with addresses, and
//!   the pattern-constrained partition families built on it.
//! - [`bijection`]: the map from ∗-pairings to multichains and its inverse.
//! - [`cumulants`]: moment/cumulant transforms, mixed moments of free
//!   families, and `2m`-norms of elements of the `n`-particle space.
//! - [`models`]: built-in R-diagonal models and independent oracles.
//! - [`haagerup`]: inequality evaluation and reports.
//! - [`spectral`]: semigroup bounds and Brown-measure ratios.
//! - [`cli`]: the command-line front end used by the `freehaag` binary.
//!
//! All scalar identities are computed over exact rationals; floats appear
//! only where roots, exponentials or quadrature are unavoidable.

pub mod bijection;
pub mod cli;
pub mod cumulants;
mod enumerate;
mod error;
pub mod exact;
pub mod haagerup;
pub mod models;
pub mod partitions;
pub mod patterns;
pub mod spectral;

pub use error::{Error, Result};
pub use exact::{Complex, Rational};
pub use partitions::{Limits, Multichain, Pairing, Partition};
