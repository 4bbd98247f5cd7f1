use num_bigint::BigInt;
use num_traits::One;

use super::QLaurent;

/// `1 - q^t`.
fn one_minus_q_pow(t: i64) -> QLaurent {
    QLaurent::from_terms([(0, BigInt::one()), (t, -BigInt::one())])
}

/// `prod_{t=lo}^{hi} (1 - q^t)`; empty product is 1.
pub(crate) fn q_factor_run(lo: i64, hi: i64) -> QLaurent {
    (lo..=hi).fold(QLaurent::one(), |acc, t| &acc * &one_minus_q_pow(t))
}

/// `(q)_n = (1 - q)(1 - q^2)...(1 - q^n)`, with `(q)_0 = 1`.
pub fn q_pochhammer(n: u64) -> QLaurent {
    q_factor_run(1, n as i64)
}

/// Gaussian binomial `[n, k]`, the zero polynomial outside `0 <= k <= n`.
///
/// Computed as `(q)_n / ((q)_k (q)_{n-k})` after cancelling the larger
/// denominator factor; the remaining division must be exact.
pub fn q_binomial(n: u64, k: i64) -> QLaurent {
    if k < 0 || k as u64 > n {
        return QLaurent::zero();
    }
    let k = (k as u64).min(n - k as u64) as i64;
    let n = n as i64;
    let num = q_factor_run(n - k + 1, n);
    num.div_exact(&q_pochhammer(k as u64))
        .unwrap_or_else(|| panic!("q-binomial [{n}, {k}] left a remainder"))
}

/// `(q)_j / ((q)_p1 (q)_p2 (q)_p3)`, zero when a part is negative.
pub fn q_multinomial3(j: u64, p1: i64, p2: i64, p3: i64) -> QLaurent {
    assert_eq!(
        p1 + p2 + p3,
        j as i64,
        "q-multinomial parts ({p1}, {p2}, {p3}) do not sum to {j}"
    );
    if p1 < 0 || p2 < 0 || p3 < 0 {
        return QLaurent::zero();
    }
    &q_binomial(j, p1) * &q_binomial(j - p1 as u64, p2)
}
