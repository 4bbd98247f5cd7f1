use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Laurent polynomial in `q` with integer coefficients, stored densely over
/// the window `[offset, offset + coeffs.len())`.
///
/// Always normalized: the first and last stored coefficients are nonzero,
/// and zero is the empty vector at offset 0. Derived equality is therefore
/// mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QLaurent {
    offset: i64,
    coeffs: Vec<BigInt>,
}

impl QLaurent {
    pub fn zero() -> Self {
        Self {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * q^exp`.
    pub fn monomial(c: impl Into<BigInt>, exp: i64) -> Self {
        Self::from_coeffs(exp, vec![c.into()])
    }

    /// `sum_t coeffs[t] * q^(offset + t)`, normalized.
    pub fn from_coeffs(offset: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = Self { offset, coeffs };
        p.normalize();
        p
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().map(|(e, c)| (e, c.into())).collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_coeffs(lo, coeffs)
    }

    fn normalize(&mut self) {
        let Some(first) = self.coeffs.iter().position(|c| !c.is_zero()) else {
            *self = Self::zero();
            return;
        };
        let last = self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
        self.coeffs.truncate(last + 1);
        self.coeffs.drain(..first);
        self.offset += first as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.offset == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent present; 0 for the zero polynomial.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn min_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.offset)
    }

    pub fn max_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.offset + self.coeffs.len() as i64 - 1)
    }

    /// Width of the exponent window (`max - min`), 0 for zero.
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        let t = exp - self.offset;
        if t < 0 || t >= self.coeffs.len() as i64 {
            BigInt::zero()
        } else {
            self.coeffs[t as usize].clone()
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(t, c)| (self.offset + t as i64, c))
    }

    /// Multiply by `q^e`.
    pub fn shift(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            offset: self.offset + e,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Specialization at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder (or the divisor is zero).
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Both are q^offset times a polynomial with nonzero constant term, so
        // the quotient is q^(a.offset - d.offset) times a polynomial quotient.
        let d = &divisor.coeffs;
        let dn = d.len();
        let mut rem = self.coeffs.clone();
        if rem.len() < dn {
            return None;
        }
        let qlen = rem.len() - dn + 1;
        let lead = &d[dn - 1];
        let mut quot = vec![BigInt::zero(); qlen];
        for t in (0..qlen).rev() {
            let top = &rem[t + dn - 1];
            if top.is_zero() {
                continue;
            }
            let (qt, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (s, ds) in d.iter().enumerate() {
                if !ds.is_zero() {
                    rem[t + s] -= &qt * ds;
                }
            }
            quot[t] = qt;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(self.offset - divisor.offset, quot))
    }

    fn max_abs_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

fn convolve_small(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let a: Vec<i128> = a.iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
    let b: Vec<i128> = b.iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (s, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (t, y) in b.iter().enumerate() {
            out[s + t] += x * y;
        }
    }
    Some(out.into_iter().map(BigInt::from).collect())
}

fn convolve_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (s, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (t, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[s + t] += x * y;
            }
        }
    }
    out
}

fn bits_of(n: usize) -> u64 {
    (usize::BITS - n.leading_zeros()) as u64
}

impl<'a> Mul<&'a QLaurent> for &'a QLaurent {
    type Output = QLaurent;

    fn mul(self, rhs: &'a QLaurent) -> QLaurent {
        if self.is_zero() || rhs.is_zero() {
            return QLaurent::zero();
        }
        // Every partial sum is bounded by max|a| * max|b| * min(len), so the
        // i128 path cannot overflow when that product fits in 126 bits.
        let budget = self.max_abs_bits()
            + rhs.max_abs_bits()
            + bits_of(self.coeffs.len().min(rhs.coeffs.len()));
        let coeffs = if budget <= 126 {
            convolve_small(&self.coeffs, &rhs.coeffs)
                .unwrap_or_else(|| convolve_big(&self.coeffs, &rhs.coeffs))
        } else {
            convolve_big(&self.coeffs, &rhs.coeffs)
        };
        QLaurent::from_coeffs(self.offset + rhs.offset, coeffs)
    }
}

impl<'a> Add<&'a QLaurent> for &'a QLaurent {
    type Output = QLaurent;

    fn add(self, rhs: &'a QLaurent) -> QLaurent {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.offset.min(rhs.offset);
        let hi = self
            .max_exponent()
            .unwrap()
            .max(rhs.max_exponent().unwrap());
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for p in [self, rhs] {
            let base = (p.offset - lo) as usize;
            for (t, c) in p.coeffs.iter().enumerate() {
                coeffs[base + t] += c;
            }
        }
        QLaurent::from_coeffs(lo, coeffs)
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;

    fn neg(self) -> QLaurent {
        QLaurent {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Sub<&'a QLaurent> for &'a QLaurent {
    type Output = QLaurent;

    fn sub(self, rhs: &'a QLaurent) -> QLaurent {
        self + &(-rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QLaurent> for QLaurent {
            type Output = QLaurent;
            fn $m(self, rhs: QLaurent) -> QLaurent {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        -&self
    }
}

impl std::iter::Sum for QLaurent {
    fn sum<I: Iterator<Item = QLaurent>>(iter: I) -> Self {
        iter.fold(QLaurent::zero(), |acc, x| &acc + &x)
    }
}

impl From<BigInt> for QLaurent {
    fn from(c: BigInt) -> Self {
        QLaurent::constant(c)
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if e == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
