//! Registered identity families.
//!
//! Each family bundles a base function `f(n, k)`, its structure constants
//! `S(k, j, i)` where a closed form is known, and for q-families the
//! exponent forms `A(k,j,i,n)`, `B(k,j,i)`, `C(k,j,r,n)`. All evaluators are
//! total: outside their support they return zero.
//!
//! Identifiers are stable strings used by the command line and the cache:
//! `C-2.1.1`, `C-2.1.2:c=2`, `C-2.2`, `C-2.3`, `D:d=3`, `Q-3.1.1`,
//! `Q-3.1.2:c=2`, `Q-3.2`, `Q-3.3`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exact::{
    as_integer, binomial, factorial, multinomial3, q_binomial, q_multinomial3, q_pochhammer,
    BigRat, QLaurent, QXPoly,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    /// `C-2.1.1`: `binom(n,k) binom(n+k,k)`.
    Schmidt,
    /// `C-2.1.2`: `binom(n,k+c) binom(n+k,k+c)`.
    ShiftedSchmidt { c: u32 },
    /// `C-2.2`: `binom(n,k)`.
    Choose,
    /// `C-2.3`: `binom(n+k,k)`.
    Multiset,
    /// `D`: `binom(n+dk,k)`; closed-form constants only for `d <= 1`.
    Dilated { d: u32 },
    /// `Q-3.1.1`: `[n,k] [n+k,k]`.
    QSchmidt,
    /// `Q-3.1.2`: `[n,k+c] [n+k,k+c]`.
    QShiftedSchmidt { c: u32 },
    /// `Q-3.2`: `[n,k]`.
    QChoose,
    /// `Q-3.3`: `[n+k,k]`.
    QMultiset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Classical,
    Q,
}

impl FamilyId {
    pub fn kind(self) -> Kind {
        use FamilyId::*;
        match self {
            Schmidt | ShiftedSchmidt { .. } | Choose | Multiset | Dilated { .. } => Kind::Classical,
            QSchmidt | QShiftedSchmidt { .. } | QChoose | QMultiset => Kind::Q,
        }
    }

    /// The classical family a q-family specializes to at `q = 1`.
    pub fn paired_classical(self) -> Option<FamilyId> {
        use FamilyId::*;
        match self {
            QSchmidt => Some(Schmidt),
            QShiftedSchmidt { c } => Some(ShiftedSchmidt { c }),
            QChoose => Some(Choose),
            QMultiset => Some(Multiset),
            _ => None,
        }
    }

    /// The four closed-form classical families (with `c = 0` for the shifted one).
    pub fn classical_closed_forms() -> [FamilyId; 4] {
        use FamilyId::*;
        [Schmidt, ShiftedSchmidt { c: 0 }, Choose, Multiset]
    }

    pub fn q_families() -> [FamilyId; 4] {
        use FamilyId::*;
        [QSchmidt, QShiftedSchmidt { c: 0 }, QChoose, QMultiset]
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FamilyId::*;
        match self {
            Schmidt => f.write_str("C-2.1.1"),
            ShiftedSchmidt { c } => write!(f, "C-2.1.2:c={c}"),
            Choose => f.write_str("C-2.2"),
            Multiset => f.write_str("C-2.3"),
            Dilated { d } => write!(f, "D:d={d}"),
            QSchmidt => f.write_str("Q-3.1.1"),
            QShiftedSchmidt { c } => write!(f, "Q-3.1.2:c={c}"),
            QChoose => f.write_str("Q-3.2"),
            QMultiset => f.write_str("Q-3.3"),
        }
    }
}

fn parse_param(s: &str, name: &str, full: &str) -> Result<u32> {
    // Accepts `:c=2`, `(c=2)`, `(2)` and `:2`.
    let body = s
        .strip_prefix(':')
        .or_else(|| s.strip_prefix('(').and_then(|t| t.strip_suffix(')')))
        .ok_or_else(|| Error::UnknownFamily(full.to_string()))?;
    let value = body
        .strip_prefix(name)
        .and_then(|t| t.strip_prefix('='))
        .unwrap_or(body)
        .trim();
    let v: i64 = value
        .parse()
        .map_err(|_| Error::UnknownFamily(full.to_string()))?;
    if v < 0 {
        return Err(Error::NegativeParameter(full.to_string()));
    }
    u32::try_from(v).map_err(|_| Error::UnknownFamily(full.to_string()))
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use FamilyId::*;
        let t = s.trim();
        Ok(match t {
            "C-2.1.1" => Schmidt,
            "C-2.2" => Choose,
            "C-2.3" => Multiset,
            "Q-3.1.1" => QSchmidt,
            "Q-3.2" => QChoose,
            "Q-3.3" => QMultiset,
            _ => {
                if let Some(rest) = t.strip_prefix("C-2.1.2") {
                    ShiftedSchmidt {
                        c: parse_param(rest, "c", s)?,
                    }
                } else if let Some(rest) = t.strip_prefix("Q-3.1.2") {
                    QShiftedSchmidt {
                        c: parse_param(rest, "c", s)?,
                    }
                } else if let Some(rest) = t.strip_prefix('D') {
                    Dilated {
                        d: parse_param(rest, "d", s)?,
                    }
                } else {
                    return Err(Error::UnknownFamily(s.to_string()));
                }
            }
        })
    }
}

/// Which exponent form of a q-family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    A,
    B,
    C,
}

/// Arguments for the exponent forms; each form reads only the ones it uses:
/// `A(k,j,i,n)`, `B(k,j,i)`, `C(k,j,r,n)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExponentArgs {
    pub k: i64,
    pub j: i64,
    pub i: i64,
    pub r: i64,
    pub n: i64,
}

/// Test hook: adds `delta` to the single structure constant `S(k, j, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perturbation {
    pub k: usize,
    pub j: usize,
    pub i: usize,
    pub delta: i64,
}

/// A registered family, optionally with a perturbed structure constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub id: FamilyId,
    perturbation: Option<Perturbation>,
}

impl From<FamilyId> for FamilySpec {
    fn from(id: FamilyId) -> Self {
        Self::new(id)
    }
}

impl FamilySpec {
    pub fn new(id: FamilyId) -> Self {
        Self {
            id,
            perturbation: None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.parse().map(Self::new)
    }

    pub fn perturbed(mut self, p: Perturbation) -> Self {
        self.perturbation = Some(p);
        self
    }

    pub fn perturbation(&self) -> Option<Perturbation> {
        self.perturbation
    }

    pub fn kind(&self) -> Kind {
        self.id.kind()
    }

    pub fn is_q(&self) -> bool {
        self.kind() == Kind::Q
    }

    fn name(&self) -> String {
        self.id.to_string()
    }

    /// The shift parameter `c`, zero for unshifted families.
    pub fn shift(&self) -> usize {
        match self.id {
            FamilyId::ShiftedSchmidt { c } | FamilyId::QShiftedSchmidt { c } => c as usize,
            _ => 0,
        }
    }

    /// Degree of `f(n, k)` as a polynomial in `n`, or in `x = q^n` for q-families.
    pub fn deg_f(&self, k: usize) -> usize {
        use FamilyId::*;
        match self.id {
            Schmidt | QSchmidt => 2 * k,
            ShiftedSchmidt { c } | QShiftedSchmidt { c } => 2 * (k + c as usize),
            Choose | Multiset | Dilated { .. } | QChoose | QMultiset => k,
        }
    }

    /// Whether `S(k, j, i)` has a registered closed form.
    pub fn has_closed_s(&self) -> bool {
        !matches!(self.id, FamilyId::Dilated { d } if d >= 2)
    }

    /// Inclusive `j`-range outside which `S(k, j, i)` vanishes.
    pub fn j_support(&self, k: usize, i: usize) -> RangeInclusive<usize> {
        match self.id {
            FamilyId::Dilated { d } if d >= 2 => 0..=i + k,
            _ => k.max(i)..=i + k + self.shift(),
        }
    }

    /// `j_support` widened to cover a perturbed entry, so sums see it.
    pub fn sum_range(&self, k: usize, i: usize) -> RangeInclusive<usize> {
        let base = self.j_support(k, i);
        match self.perturbation {
            Some(p) if p.k == k && p.i == i => (*base.start()).min(p.j)..=(*base.end()).max(p.j),
            _ => base,
        }
    }

    /// Largest `j` that can appear in the expansion of `f(n,k)^r`: the top
    /// of the graded basis below degree `r * deg_f(k)`.
    pub fn composed_top(&self, k: usize, r: usize) -> usize {
        let bound = r * self.deg_f(k);
        let mut j = k;
        while self.deg_f(j + 1) <= bound {
            j += 1;
        }
        j
    }

    /// Where `a^(r)_{k,j}` (or `P^(r)_{k,j}`) may be nonzero.
    pub fn composed_support(&self, k: usize, r: usize) -> RangeInclusive<usize> {
        let lo = if self.has_closed_s() { k } else { 0 };
        lo.min(k)..=self.composed_top(k, r)
    }

    fn require(&self, kind: Kind, what: &'static str) -> Result<()> {
        if self.kind() == kind {
            Ok(())
        } else {
            Err(Error::Capability {
                family: self.name(),
                what,
                hint: match kind {
                    Kind::Classical => "use the q-valued evaluators for q-families",
                    Kind::Q => "this is a classical family",
                },
            })
        }
    }

    /// `f(n, k)` for a classical family.
    pub fn eval_f_int(&self, n: u64, k: usize) -> Result<BigInt> {
        use FamilyId::*;
        self.require(Kind::Classical, "integer f(n,k)")?;
        let k64 = k as u64;
        Ok(match self.id {
            Schmidt => binomial(n, k as i64) * binomial(n + k64, k as i64),
            ShiftedSchmidt { c } => {
                let m = (k64 + c as u64) as i64;
                binomial(n, m) * binomial(n + k64, m)
            }
            Choose => binomial(n, k as i64),
            Multiset => binomial(n + k64, k as i64),
            Dilated { d } => binomial(n + d as u64 * k64, k as i64),
            _ => unreachable!(),
        })
    }

    /// `f(n, k)` for a q-family.
    pub fn eval_f_q(&self, n: u64, k: usize) -> Result<QLaurent> {
        use FamilyId::*;
        self.require(Kind::Q, "q-valued f(n,k)")?;
        let k64 = k as u64;
        Ok(match self.id {
            QSchmidt => &q_binomial(n, k as i64) * &q_binomial(n + k64, k as i64),
            QShiftedSchmidt { c } => {
                let m = (k64 + c as u64) as i64;
                &q_binomial(n, m) * &q_binomial(n + k64, m)
            }
            QChoose => q_binomial(n, k as i64),
            QMultiset => q_binomial(n + k64, k as i64),
            _ => unreachable!(),
        })
    }

    /// `f(n, k)` of a q-family written as `numerator(x) / denominator(q)`
    /// with `x = q^n`. The numerator's x-degree is `deg_f(k)`.
    pub fn f_xpoly(&self, k: usize) -> Result<(QXPoly, QLaurent)> {
        use FamilyId::*;
        self.require(Kind::Q, "f(n,k) as a polynomial in q^n")?;
        let k = k as i64;
        // [n, m] (q)_m = prod_{t=0}^{m-1} (1 - q^-t x)
        let lower = |m: i64| -> QXPoly { (0..m).map(|t| QXPoly::one_minus_x_q(-t)).product() };
        // [n+k, m] (q)_m = prod_{s=k-m+1}^{k} (1 - q^s x)
        let upper = |m: i64| -> QXPoly { (k - m + 1..=k).map(QXPoly::one_minus_x_q).product() };
        let poch = |m: i64| q_pochhammer(m as u64);
        Ok(match self.id {
            QSchmidt => (&lower(k) * &upper(k), &poch(k) * &poch(k)),
            QShiftedSchmidt { c } => {
                let m = k + c as i64;
                (&lower(m) * &upper(m), &poch(m) * &poch(m))
            }
            QChoose => (lower(k), poch(k)),
            QMultiset => (upper(k), poch(k)),
            _ => unreachable!(),
        })
    }

    /// `f(n, k)` of a q-family at any integer `n`, through its polynomial
    /// form in `x = q^n`. Agrees with [`Self::eval_f_q`] for `n >= 0`.
    pub fn eval_f_q_ext(&self, n: i64, k: usize) -> Result<QLaurent> {
        let (num, den) = self.f_xpoly(k)?;
        num.eval_at_q_pow(n)
            .div_exact(&den)
            .ok_or_else(|| Error::InexactDivision {
                family: self.name(),
                what: "f(n,k) from its x-form",
                at: format!("n={n}, k={k}"),
            })
    }

    fn perturbation_at(&self, k: usize, j: usize, i: usize) -> i64 {
        match self.perturbation {
            Some(p) if (p.k, p.j, p.i) == (k, j, i) => p.delta,
            _ => 0,
        }
    }

    fn no_closed_form(&self) -> Error {
        Error::Capability {
            family: self.name(),
            what: "closed-form S(k,j,i)",
            hint: "recover it with discovery::discover_s",
        }
    }

    /// Integer structure constant of a classical family, zero off support.
    pub fn eval_s_int(&self, k: usize, j: usize, i: usize) -> Result<BigInt> {
        use FamilyId::*;
        self.require(Kind::Classical, "integer S(k,j,i)")?;
        let (kk, jj, ii) = (k as i64, j as i64, i as i64);
        let mult = |top: u64, last: i64| multinomial3(top, jj - ii, jj - kk, last);
        let base = match self.id {
            Schmidt => binomial((i + k) as u64, ii) * mult(j as u64, ii + kk - jj),
            ShiftedSchmidt { c } => {
                let c = c as u64;
                let (i, k, j) = (i as u64, k as u64, j as u64);
                let m = mult(j + c, ii + kk + c as i64 - jj);
                if m.is_zero() {
                    BigInt::zero()
                } else {
                    let value = BigRat::new(
                        factorial(i + k + c) * factorial(j + c) * m,
                        factorial(i + c) * factorial(k + c) * factorial(j),
                    );
                    as_integer(&value).ok_or_else(|| Error::NonIntegral {
                        family: self.name(),
                        what: "S(k,j,i)",
                        at: format!("k={k}, j={j}, i={i}"),
                    })?
                }
            }
            Choose | Dilated { d: 0 } => mult(j as u64, ii + kk - jj),
            Multiset | Dilated { d: 1 } => {
                let m = mult(j as u64, ii + kk - jj);
                if (i + j + k) % 2 == 1 {
                    -m
                } else {
                    m
                }
            }
            Dilated { .. } => return Err(self.no_closed_form()),
            _ => unreachable!(),
        };
        Ok(base + self.perturbation_at(k, j, i))
    }

    /// Laurent-polynomial structure constant of a q-family, zero off support.
    pub fn eval_s_q(&self, k: usize, j: usize, i: usize) -> Result<QLaurent> {
        use FamilyId::*;
        self.require(Kind::Q, "q-valued S(k,j,i)")?;
        let (kk, jj, ii) = (k as i64, j as i64, i as i64);
        let mult = |top: u64, last: i64| q_multinomial3(top, jj - ii, jj - kk, last);
        let base = match self.id {
            QSchmidt => &q_binomial((i + k) as u64, ii) * &mult(j as u64, ii + kk - jj),
            QShiftedSchmidt { c } => {
                let c = c as u64;
                let (i, k, j) = (i as u64, k as u64, j as u64);
                let m = mult(j + c, ii + kk + c as i64 - jj);
                if m.is_zero() {
                    QLaurent::zero()
                } else {
                    let num = &(&q_pochhammer(i + k + c) * &q_pochhammer(j + c)) * &m;
                    let den = &(&q_pochhammer(i + c) * &q_pochhammer(k + c)) * &q_pochhammer(j);
                    num.div_exact(&den).ok_or_else(|| Error::InexactDivision {
                        family: self.name(),
                        what: "S(k,j,i)",
                        at: format!("k={k}, j={j}, i={i}"),
                    })?
                }
            }
            QChoose => mult(j as u64, ii + kk - jj),
            QMultiset => {
                let m = mult(j as u64, ii + kk - jj);
                if (i + j + k) % 2 == 1 {
                    -m
                } else {
                    m
                }
            }
            _ => unreachable!(),
        };
        let delta = self.perturbation_at(k, j, i);
        Ok(if delta == 0 {
            base
        } else {
            &base + &QLaurent::constant(delta)
        })
    }

    /// Evaluates one exponent form. Halved forms must land on integers.
    pub fn exponent(&self, which: Exponent, a: ExponentArgs) -> Result<i64> {
        use FamilyId::*;
        self.require(Kind::Q, "exponent forms")?;
        let ExponentArgs { k, j, i, r, n } = a;
        let c = self.shift() as i64;
        // (numerator, denominator)
        let (num, den) = match (self.id, which) {
            (QSchmidt, Exponent::A) => ((n - j) * (k + i - j), 1),
            (QSchmidt, Exponent::B) => (-(k + i - j) * j, 1),
            (QSchmidt | QMultiset, Exponent::C) => ((r * k - j) * n, 1),
            (QShiftedSchmidt { .. }, Exponent::A) => {
                ((n - j) * (k + i - j) + c * (n - k - i - c), 1)
            }
            (QShiftedSchmidt { .. }, Exponent::B) => (-(k + i - j) * j - c * (k + i + c), 1),
            (QShiftedSchmidt { .. }, Exponent::C) => ((r * k - j) * n + r * c * n - c * n, 1),
            (QChoose, Exponent::A | Exponent::B) => ((j - i) * (j - k), 1),
            (QChoose, Exponent::C) => (0, 1),
            (QMultiset, Exponent::A) => ((k + i - j) * (2 * n + k + i - j + 1), 2),
            (QMultiset, Exponent::B) => ((k + i - j) * (k + i - j + 1), 2),
            _ => unreachable!(),
        };
        if num % den != 0 {
            return Err(Error::NonIntegralExponent {
                family: self.name(),
                which: match which {
                    Exponent::A => 'A',
                    Exponent::B => 'B',
                    Exponent::C => 'C',
                },
                args: format!("{a:?}"),
            });
        }
        Ok(num / den)
    }

    pub fn exp_a(&self, k: usize, j: usize, i: usize, n: i64) -> Result<i64> {
        self.exponent(
            Exponent::A,
            ExponentArgs {
                k: k as i64,
                j: j as i64,
                i: i as i64,
                n,
                ..Default::default()
            },
        )
    }

    pub fn exp_b(&self, k: usize, j: usize, i: usize) -> Result<i64> {
        self.exponent(
            Exponent::B,
            ExponentArgs {
                k: k as i64,
                j: j as i64,
                i: i as i64,
                ..Default::default()
            },
        )
    }

    pub fn exp_c(&self, k: usize, j: usize, r: usize, n: i64) -> Result<i64> {
        self.exponent(
            Exponent::C,
            ExponentArgs {
                k: k as i64,
                j: j as i64,
                r: r as i64,
                n,
                ..Default::default()
            },
        )
    }

    /// For the q back-substitution oracle: an integer `n` at which
    /// `f(n, j') != 0` exactly for `j' <= j`, so `j` is the newest unknown.
    pub(crate) fn triangular_point(&self, j: usize) -> i64 {
        match self.id {
            // [n+j, j] in x = q^n vanishes at x = q^-m for 1 <= m <= j.
            FamilyId::QMultiset => -(j as i64) - 1,
            _ => (j + self.shift()) as i64,
        }
    }

    /// Checks that the closed-form `S` vanishes on a margin of two `j`
    /// values outside the declared support, over `k, i <= kmax, imax`.
    pub fn validate_support(&self, kmax: usize, imax: usize) -> Result<()> {
        if !self.has_closed_s() {
            return Ok(());
        }
        for k in 0..=kmax {
            for i in 0..=imax {
                let sup = self.j_support(k, i);
                let outside = (sup.start().saturating_sub(2)..*sup.start())
                    .chain(sup.end() + 1..=sup.end() + 2);
                for j in outside {
                    let zero = match self.kind() {
                        Kind::Classical => self.eval_s_int(k, j, i)?.is_zero(),
                        Kind::Q => self.eval_s_q(k, j, i)?.is_zero(),
                    };
                    if !zero {
                        return Err(Error::Falsified(format!(
                            "{}: S({k},{j},{i}) is nonzero outside the declared support {sup:?}",
                            self.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Structure constants of a classical basis, closed-form or discovered.
pub trait ClassicalConstants: Sync {
    fn family(&self) -> FamilyId;

    fn constant(&self, k: usize, j: usize, i: usize) -> Result<BigRat>;

    /// Range of `j` to sum over for the product `f(n,i) f(n,k)`.
    fn support(&self, k: usize, i: usize) -> RangeInclusive<usize>;
}

impl ClassicalConstants for FamilySpec {
    fn family(&self) -> FamilyId {
        self.id
    }

    fn constant(&self, k: usize, j: usize, i: usize) -> Result<BigRat> {
        self.eval_s_int(k, j, i).map(BigRat::from_integer)
    }

    fn support(&self, k: usize, i: usize) -> RangeInclusive<usize> {
        self.sum_range(k, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use FamilyId::*;

    fn spec(id: FamilyId) -> FamilySpec {
        FamilySpec::new(id)
    }

    fn q(c: &[i64]) -> QLaurent {
        QLaurent::from_coeffs(0, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn identifiers_round_trip() {
        let ids = [
            Schmidt,
            ShiftedSchmidt { c: 2 },
            Choose,
            Multiset,
            Dilated { d: 3 },
            QSchmidt,
            QShiftedSchmidt { c: 2 },
            QChoose,
            QMultiset,
        ];
        for id in ids {
            assert_eq!(id.to_string().parse::<FamilyId>().unwrap(), id);
        }
        assert_eq!(
            "C-2.1.2(1)".parse::<FamilyId>().unwrap(),
            ShiftedSchmidt { c: 1 }
        );
        assert_eq!("D:3".parse::<FamilyId>().unwrap(), Dilated { d: 3 });
        assert!(matches!(
            "C-9".parse::<FamilyId>(),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            "C-2.1.2:c=-1".parse::<FamilyId>(),
            Err(Error::NegativeParameter(_))
        ));
        assert!(matches!(
            "D:d=x".parse::<FamilyId>(),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn eval_f_examples() {
        assert_eq!(spec(Schmidt).eval_f_int(1, 1).unwrap(), BigInt::from(2));
        assert_eq!(
            spec(Dilated { d: 2 }).eval_f_int(0, 1).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(spec(QSchmidt).eval_f_q(1, 1).unwrap(), q(&[1, 1]));
        assert!(spec(QSchmidt).eval_f_int(1, 1).is_err());
    }

    #[test]
    fn eval_s_examples() {
        assert_eq!(spec(Schmidt).eval_s_int(1, 2, 1).unwrap(), BigInt::from(4));
        assert_eq!(
            spec(Multiset).eval_s_int(1, 1, 1).unwrap(),
            BigInt::from(-1)
        );
        for id in [
            Schmidt,
            Choose,
            Multiset,
            Dilated { d: 0 },
            Dilated { d: 1 },
        ] {
            for k in 0..6 {
                for j in 0..8 {
                    let expect = BigInt::from((j == k) as i64);
                    assert_eq!(
                        spec(id).eval_s_int(k, j, 0).unwrap(),
                        expect,
                        "{id} ({k},{j},0)"
                    );
                }
            }
        }
        let err = spec(Dilated { d: 2 }).eval_s_int(1, 1, 1).unwrap_err();
        assert!(matches!(err, Error::Capability { .. }), "{err}");
        assert!(err.to_string().contains("discover"));
    }

    #[test]
    fn exponent_examples() {
        let a = ExponentArgs {
            k: 1,
            j: 1,
            i: 1,
            r: 0,
            n: 2,
        };
        assert_eq!(spec(QSchmidt).exponent(Exponent::A, a).unwrap(), 1);
        for k in 0..4 {
            for j in 0..4 {
                for r in 0..4 {
                    for n in 0..4 {
                        assert_eq!(spec(QChoose).exp_c(k, j, r, n).unwrap(), 0);
                    }
                }
            }
        }
        assert_eq!(spec(QMultiset).exp_b(1, 1, 1).unwrap(), 1);
        assert!(spec(Schmidt).exp_b(1, 1, 1).is_err());
    }

    #[test]
    fn halved_exponents_are_integral_on_integer_points() {
        let s = spec(QMultiset);
        for k in -6..6 {
            for j in -6..6 {
                for i in -6..6 {
                    for n in -6..6 {
                        let a = ExponentArgs { k, j, i, r: 1, n };
                        s.exponent(Exponent::A, a).unwrap();
                        s.exponent(Exponent::B, a).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn support_examples() {
        assert_eq!(spec(Choose).j_support(1, 1), 1..=2);
        assert_eq!(spec(ShiftedSchmidt { c: 1 }).j_support(1, 1), 1..=3);
        assert_eq!(spec(Dilated { d: 2 }).j_support(1, 1), 0..=2);
    }

    #[test]
    fn supports_hold_with_margin() {
        for id in [
            Schmidt,
            ShiftedSchmidt { c: 0 },
            ShiftedSchmidt { c: 1 },
            ShiftedSchmidt { c: 2 },
            Choose,
            Multiset,
            QSchmidt,
            QShiftedSchmidt { c: 1 },
            QShiftedSchmidt { c: 2 },
            QChoose,
            QMultiset,
        ] {
            spec(id).validate_support(6, 6).unwrap();
        }
    }

    #[test]
    fn shifted_with_zero_shift_matches_unshifted() {
        for k in 0..=10 {
            for j in 0..=10 {
                for i in 0..=10 {
                    assert_eq!(
                        spec(ShiftedSchmidt { c: 0 }).eval_s_int(k, j, i).unwrap(),
                        spec(Schmidt).eval_s_int(k, j, i).unwrap()
                    );
                }
            }
        }
        for k in 0..=5 {
            for j in 0..=8 {
                for i in 0..=5 {
                    assert_eq!(
                        spec(QShiftedSchmidt { c: 0 }).eval_s_q(k, j, i).unwrap(),
                        spec(QSchmidt).eval_s_q(k, j, i).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn dilated_controls_coincide() {
        for n in 0..=20 {
            for k in 0..=20 {
                assert_eq!(
                    spec(Dilated { d: 0 }).eval_f_int(n, k).unwrap(),
                    spec(Choose).eval_f_int(n, k).unwrap()
                );
                assert_eq!(
                    spec(Dilated { d: 1 }).eval_f_int(n, k).unwrap(),
                    spec(Multiset).eval_f_int(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn q_families_specialize_at_one() {
        for qid in [
            QSchmidt,
            QShiftedSchmidt { c: 1 },
            QShiftedSchmidt { c: 2 },
            QChoose,
            QMultiset,
        ] {
            let qs = spec(qid);
            let cs = spec(qid.paired_classical().unwrap());
            for n in 0..=12 {
                for k in 0..=12 {
                    assert_eq!(
                        qs.eval_f_q(n, k).unwrap().eval_at_one(),
                        cs.eval_f_int(n, k).unwrap(),
                        "{qid} f({n},{k})"
                    );
                }
            }
            for k in 0..=8 {
                for j in 0..=8 {
                    for i in 0..=8 {
                        assert_eq!(
                            qs.eval_s_q(k, j, i).unwrap().eval_at_one(),
                            cs.eval_s_int(k, j, i).unwrap(),
                            "{qid} S({k},{j},{i})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn structure_constants_are_symmetric() {
        for id in [Schmidt, ShiftedSchmidt { c: 2 }, Choose, Multiset] {
            for k in 0..=8 {
                for j in 0..=8 {
                    for i in 0..=8 {
                        assert_eq!(spec(id).eval_s_int(k, j, i), spec(id).eval_s_int(i, j, k));
                    }
                }
            }
        }
        for id in [QSchmidt, QShiftedSchmidt { c: 2 }, QChoose, QMultiset] {
            for k in 0..=6 {
                for j in 0..=8 {
                    for i in 0..=6 {
                        assert_eq!(spec(id).eval_s_q(k, j, i), spec(id).eval_s_q(i, j, k));
                    }
                }
            }
        }
    }

    #[test]
    fn degrees_strictly_increase() {
        for id in [
            Schmidt,
            ShiftedSchmidt { c: 3 },
            Choose,
            Multiset,
            Dilated { d: 4 },
            QSchmidt,
            QShiftedSchmidt { c: 3 },
            QChoose,
            QMultiset,
        ] {
            for k in 0..20 {
                assert!(spec(id).deg_f(k + 1) > spec(id).deg_f(k));
            }
        }
    }

    #[test]
    fn x_forms_match_definition_and_degree() {
        for id in [
            QSchmidt,
            QShiftedSchmidt { c: 1 },
            QShiftedSchmidt { c: 2 },
            QChoose,
            QMultiset,
        ] {
            let s = spec(id);
            for k in 0..5 {
                let (num, _) = s.f_xpoly(k).unwrap();
                assert_eq!(num.x_degree(), Some(s.deg_f(k) as u32), "{id} k={k}");
                for n in 0..10 {
                    assert_eq!(
                        s.eval_f_q_ext(n, k).unwrap(),
                        s.eval_f_q(n as u64, k).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn triangular_points_expose_one_new_basis_element() {
        for id in [QSchmidt, QShiftedSchmidt { c: 2 }, QChoose, QMultiset] {
            let s = spec(id);
            for j in 0..5 {
                let n = s.triangular_point(j);
                for jp in 0..8 {
                    let v = s.eval_f_q_ext(n, jp).unwrap();
                    assert_eq!(v.is_zero(), jp > j, "{id} n={n} j'={jp}");
                }
            }
        }
    }

    #[test]
    fn composed_support_tops() {
        assert_eq!(spec(Schmidt).composed_support(2, 3), 2..=6);
        assert_eq!(spec(ShiftedSchmidt { c: 2 }).composed_support(1, 3), 1..=7);
        assert_eq!(spec(Dilated { d: 2 }).composed_support(1, 2), 0..=2);
        assert_eq!(spec(Choose).composed_support(3, 1), 3..=3);
    }

    #[test]
    fn perturbation_shifts_one_value() {
        let s = spec(Choose).perturbed(Perturbation {
            k: 1,
            j: 2,
            i: 1,
            delta: 1,
        });
        assert_eq!(s.eval_s_int(1, 2, 1).unwrap(), BigInt::from(3));
        assert_eq!(s.eval_s_int(1, 1, 1).unwrap(), BigInt::from(1));
        let s = spec(Choose).perturbed(Perturbation {
            k: 1,
            j: 5,
            i: 1,
            delta: 1,
        });
        assert_eq!(s.sum_range(1, 1), 1..=5);
    }
}
