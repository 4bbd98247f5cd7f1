//! Exact computation, verification and discovery of binomial-product
//! expansions.
//!
//! For a base function `f(n, k)` (a product of binomial or Gaussian-binomial
//! coefficients) the crate computes the integers `a^(r)_{k,j}` with
//! `f(n,k)^r = sum_j a^(r)_{k,j} f(n,j)`, the structure constants
//! `S(k,j,i)` that express `f(n,i) f(n,k)` back in the basis `{f(n,j)}`,
//! and their q-analogs with exponent weights `q^A`, `q^B`, `q^C`.
//!
//! - [`exact`]: big rationals, Laurent polynomials in `q`, q-combinatorics,
//!   fraction-free linear algebra.
//! - [`families`]: the registered identity families.
//! - [`coefficients`]: expansion tables by recursion and by direct solve.
//! - [`verify`]: complete proofs by degree-bounded identity testing.
//! - [`discovery`]: structure constants from raw data, integrality scans,
//!   recurrence guessing.
//! - [`grid`]: the cell-parallel driver shared by every sweep.

pub mod coefficients;
pub mod discovery;
mod error;
pub mod exact;
pub mod families;
pub mod grid;
pub mod verify;

pub use error::{Error, Result};
