use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::QLaurent;

/// Polynomial in `x` (standing for `q^n`) whose coefficients are Laurent
/// polynomials in `q`. Only nonzero coefficients are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QXPoly {
    terms: BTreeMap<u32, QLaurent>,
}

impl QXPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(QLaurent::one())
    }

    pub fn constant(c: QLaurent) -> Self {
        Self::term(0, c)
    }

    /// `c * x^e`.
    pub fn term(e: u32, c: QLaurent) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `1 - q^s x`, one factor of a Gaussian binomial written in `x = q^n`.
    pub fn one_minus_x_q(s: i64) -> Self {
        &Self::one() + &Self::term(1, QLaurent::monomial(-BigInt::one(), s))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest stored x-exponent; `None` for zero.
    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: u32) -> QLaurent {
        self.terms.get(&e).cloned().unwrap_or_else(QLaurent::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &QLaurent)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Substitutes `x = q^n`; `n` may be negative.
    pub fn eval_at_q_pow(&self, n: i64) -> QLaurent {
        self.terms.iter().map(|(e, c)| c.shift(n * *e as i64)).sum()
    }

    pub fn scale(&self, c: &QLaurent) -> Self {
        let mut out = Self::zero();
        for (e, t) in &self.terms {
            out.add_term(*e, c * t);
        }
        out
    }

    fn add_term(&mut self, e: u32, c: QLaurent) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }
}

impl<'a> std::ops::Add<&'a QXPoly> for &'a QXPoly {
    type Output = QXPoly;

    fn add(self, rhs: &'a QXPoly) -> QXPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a QXPoly> for &'a QXPoly {
    type Output = QXPoly;

    fn mul(self, rhs: &'a QXPoly) -> QXPoly {
        let mut out = QXPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl std::iter::Product for QXPoly {
    fn product<I: Iterator<Item = QXPoly>>(iter: I) -> Self {
        iter.fold(QXPoly::one(), |acc, x| &acc * &x)
    }
}
