//! Exact arithmetic used throughout the crate: big rationals, Laurent
//! polynomials in `q`, integer and q-combinatorics, and dense exact linear
//! algebra.
//!
//! Every value here is immutable once built and every operation is a pure
//! function, so results can be shared freely between worker threads.

mod combinat;
mod laurent;
mod linalg;
mod qcombinat;
mod qxpoly;

pub use combinat::{binomial, factorial, multinomial3};
pub use laurent::QLaurent;
pub use linalg::{nullspace_exact, solve_exact, Degenerate, Matrix};
pub use qcombinat::{q_binomial, q_multinomial3, q_pochhammer};
pub use qxpoly::QXPoly;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator. Zero is `0/1`.
pub type BigRat = num_rational::BigRational;

pub fn rat(n: impl Into<BigInt>) -> BigRat {
    BigRat::from_integer(n.into())
}

pub fn rat_frac(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRat {
    BigRat::new(n.into(), d.into())
}

/// Integer value of `x` when its denominator is one.
pub fn as_integer(x: &BigRat) -> Option<BigInt> {
    if x.denom().is_one() {
        Some(x.numer().clone())
    } else {
        None
    }
}

pub(crate) fn is_zero_rat(x: &BigRat) -> bool {
    x.numer().is_zero()
}
