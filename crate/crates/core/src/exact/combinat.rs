use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, t| acc * t)
}

/// `n` choose `k`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    // acc stays integral: after step t it equals binom(n - k + t, t).
    for t in 1..=k {
        acc *= n - k + t;
        acc /= t;
    }
    acc
}

/// `j! / (p1! p2! p3!)`, or zero when any part is negative.
///
/// Panics if the parts do not sum to `j`.
pub fn multinomial3(j: u64, p1: i64, p2: i64, p3: i64) -> BigInt {
    assert_eq!(
        p1 + p2 + p3,
        j as i64,
        "multinomial parts ({p1}, {p2}, {p3}) do not sum to {j}"
    );
    if p1 < 0 || p2 < 0 || p3 < 0 {
        return BigInt::zero();
    }
    binomial(j, p1) * binomial(j - p1 as u64, p2)
}
