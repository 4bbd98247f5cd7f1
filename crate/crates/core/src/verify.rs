//! Complete proofs of fixed-parameter identities by degree-bounded testing.
//!
//! For fixed `(k, i)` both sides of `f(n,i) f(n,k) = sum_j S(k,j,i) f(n,j)`
//! are polynomials in `n` of degree at most `D = deg_f(i) + deg_f(k)`. Exact
//! agreement at `D + 1` distinct points is therefore a proof. On the q side
//! the same holds in `x = q^n`: both sides are Laurent polynomials in `x`
//! over the field of rational functions in `q`, and `x = q^0, q^1, ...` are
//! distinct elements of that field. The exponent window in `x` is computed
//! from the stored degrees and the `n`-slopes of the exponent forms, so the
//! bound also covers perturbed or unusual tables.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::coefficients::{a_table_direct, a_table_recursive, p_table_q, ClassicalTable, QTable};
use crate::exact::{BigRat, QLaurent};
use crate::families::{ClassicalConstants, FamilyId, FamilySpec, Kind};
use crate::grid::{ki_cells, map_cells};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    ProductIdentity,
    ExponentLaw,
    Expansion,
}

impl Statement {
    pub fn as_str(self) -> &'static str {
        match self {
            Statement::ProductIdentity => "product-identity",
            Statement::ExponentLaw => "exponent-law",
            Statement::Expansion => "expansion",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Proved,
    Falsified,
    CheckedOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Falsified => "falsified",
            Status::CheckedOnly => "checked-only",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A side of an identity at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Rat(BigRat),
    Laurent(QLaurent),
}

impl From<BigInt> for Value {
    fn from(v: BigInt) -> Self {
        Value::Rat(BigRat::from_integer(v))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rat(v) => write!(f, "{v}"),
            Value::Laurent(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Coordinates of the failing point, e.g. `{"n": 3}`.
    pub at: BTreeMap<String, i64>,
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofReport {
    pub family: FamilyId,
    pub statement: Statement,
    pub params: BTreeMap<String, i64>,
    pub status: Status,
    pub degree_bound: usize,
    pub points_checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl ProofReport {
    /// Builds a report whose status follows from the evidence: a
    /// counterexample falsifies, otherwise enough points prove.
    fn conclude(
        family: FamilyId,
        statement: Statement,
        params: &[(&str, i64)],
        degree_bound: usize,
        points_checked: usize,
        counterexample: Option<Counterexample>,
    ) -> Self {
        let status = if counterexample.is_some() {
            Status::Falsified
        } else if points_checked > degree_bound {
            Status::Proved
        } else {
            Status::CheckedOnly
        };
        Self {
            family,
            statement,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            status,
            degree_bound,
            points_checked,
            counterexample,
        }
    }

    pub fn is_proved(&self) -> bool {
        self.status == Status::Proved
    }

    pub fn is_falsified(&self) -> bool {
        self.status == Status::Falsified
    }

    /// The structural invariant every report must satisfy.
    pub fn is_well_formed(&self) -> bool {
        match self.status {
            Status::Proved => {
                self.points_checked > self.degree_bound && self.counterexample.is_none()
            }
            Status::Falsified => self.counterexample.is_some(),
            Status::CheckedOnly => self.counterexample.is_none(),
        }
    }
}

fn at_n(n: i64) -> BTreeMap<String, i64> {
    BTreeMap::from([("n".to_string(), n)])
}

/// Proves `f(n,i) f(n,k) = sum_j S(k,j,i) f(n,j)` for all `n >= 0`, with
/// `S` taken from the family's closed form.
pub fn verify_product_identity_classical(
    spec: &FamilySpec,
    k: usize,
    i: usize,
) -> Result<ProofReport> {
    verify_product_identity_with(spec, spec, k, i)
}

/// As [`verify_product_identity_classical`] with structure constants from any
/// source, e.g. values recovered by discovery.
pub fn verify_product_identity_with<S: ClassicalConstants + ?Sized>(
    spec: &FamilySpec,
    consts: &S,
    k: usize,
    i: usize,
) -> Result<ProofReport> {
    if spec.kind() != Kind::Classical {
        return Err(Error::Capability {
            family: spec.id.to_string(),
            what: "classical product identity",
            hint: "use verify_product_identity_q",
        });
    }
    let support = consts.support(k, i);
    let s: Vec<(usize, BigRat)> = support
        .clone()
        .map(|j| consts.constant(k, j, i).map(|v| (j, v)))
        .collect::<Result<_>>()?;
    let top_degree = support.map(|j| spec.deg_f(j)).max().unwrap_or(0);
    let bound = (spec.deg_f(i) + spec.deg_f(k)).max(top_degree);
    let mut counterexample = None;
    for n in 0..=bound as u64 {
        let lhs = BigRat::from_integer(spec.eval_f_int(n, i)? * spec.eval_f_int(n, k)?);
        let mut rhs = BigRat::default();
        for (j, sj) in &s {
            rhs += sj * BigRat::from_integer(spec.eval_f_int(n, *j)?);
        }
        if lhs != rhs {
            counterexample = Some(Counterexample {
                at: at_n(n as i64),
                lhs: Value::Rat(lhs),
                rhs: Value::Rat(rhs),
            });
            break;
        }
    }
    let points = counterexample
        .as_ref()
        .map_or(bound + 1, |c| c.at["n"] as usize + 1);
    Ok(ProofReport::conclude(
        spec.id,
        Statement::ProductIdentity,
        &[("k", k as i64), ("i", i as i64)],
        bound,
        points,
        counterexample,
    ))
}

/// Coefficient of `n` in an exponent form that must be affine in `n`.
fn n_slope(family: FamilyId, at: impl Fn(i64) -> Result<i64>) -> Result<i64> {
    let (e0, e1, e2) = (at(0)?, at(1)?, at(2)?);
    if e2 - e1 != e1 - e0 {
        return Err(Error::Falsified(format!(
            "{family}: exponent form is not affine in n"
        )));
    }
    Ok(e1 - e0)
}

/// Width of the x-exponent window spanned by terms `x^slope * f(n,j)`
/// together with an LHS of x-degree `lhs_degree`.
fn x_window(spec: &FamilySpec, lhs_degree: usize, terms: &[(usize, i64)]) -> usize {
    let lo = terms.iter().map(|&(_, s)| s).min().unwrap_or(0).min(0);
    let hi = terms
        .iter()
        .map(|&(j, s)| s + spec.deg_f(j) as i64)
        .max()
        .unwrap_or(0)
        .max(lhs_degree as i64);
    (hi - lo) as usize
}

/// Proves `f(n,i) f(n,k) = sum_j q^A(k,j,i,n) S(k,j,i) f(n,j)` for all `n >= 0`.
pub fn verify_product_identity_q(spec: &FamilySpec, k: usize, i: usize) -> Result<ProofReport> {
    let mut terms = Vec::new();
    let mut s = Vec::new();
    for j in spec.sum_range(k, i) {
        let sj = spec.eval_s_q(k, j, i)?;
        if sj.is_zero() {
            continue;
        }
        terms.push((j, n_slope(spec.id, |n| spec.exp_a(k, j, i, n))?));
        s.push((j, sj));
    }
    let bound = x_window(spec, spec.deg_f(i) + spec.deg_f(k), &terms);
    let mut counterexample = None;
    for n in 0..=bound as u64 {
        let lhs = &spec.eval_f_q(n, i)? * &spec.eval_f_q(n, k)?;
        let mut rhs = QLaurent::zero();
        for (j, sj) in &s {
            let term = (sj * &spec.eval_f_q(n, *j)?).shift(spec.exp_a(k, *j, i, n as i64)?);
            rhs = &rhs + &term;
        }
        if lhs != rhs {
            counterexample = Some(Counterexample {
                at: at_n(n as i64),
                lhs: Value::Laurent(lhs),
                rhs: Value::Laurent(rhs),
            });
            break;
        }
    }
    let points = counterexample
        .as_ref()
        .map_or(bound + 1, |c| c.at["n"] as usize + 1);
    Ok(ProofReport::conclude(
        spec.id,
        Statement::ProductIdentity,
        &[("k", k as i64), ("i", i as i64)],
        bound,
        points,
        counterexample,
    ))
}

/// Grid side length for the exponent-law check; one more than the largest
/// per-variable degree (2) of any registered form.
const LAW_GRID: i64 = 4;

/// Proves `B(k,j,i) + C(k,j,r+1,n) = A(k,j,i,n) + C(k,i,r,n)` and
/// `C(k,k,1,n) = 0` identically.
///
/// Every registered form has degree at most 2 in each variable, so agreement
/// on `{0,1,2,3}^5` (respectively `{0,1,2,3}^2`) proves both laws.
pub fn verify_exponent_laws(spec: &FamilySpec) -> Result<ProofReport> {
    let mut counterexample = None;
    let mut points = 0usize;
    let coords = |names: &[&str], vals: &[i64]| -> BTreeMap<String, i64> {
        names
            .iter()
            .map(|s| s.to_string())
            .zip(vals.iter().copied())
            .collect()
    };
    'grid: for k in 0..LAW_GRID {
        for j in 0..LAW_GRID {
            for i in 0..LAW_GRID {
                for r in 0..LAW_GRID {
                    for n in 0..LAW_GRID {
                        let (ku, ju, iu, ru) = (k as usize, j as usize, i as usize, r as usize);
                        let lhs = spec.exp_b(ku, ju, iu)? + spec.exp_c(ku, ju, ru + 1, n)?;
                        let rhs = spec.exp_a(ku, ju, iu, n)? + spec.exp_c(ku, iu, ru, n)?;
                        points += 1;
                        if lhs != rhs {
                            counterexample = Some(Counterexample {
                                at: coords(&["k", "j", "i", "r", "n"], &[k, j, i, r, n]),
                                lhs: BigInt::from(lhs).into(),
                                rhs: BigInt::from(rhs).into(),
                            });
                            break 'grid;
                        }
                    }
                }
            }
        }
    }
    if counterexample.is_none() {
        'base: for k in 0..LAW_GRID {
            for n in 0..LAW_GRID {
                let c = spec.exp_c(k as usize, k as usize, 1, n)?;
                points += 1;
                if c != 0 {
                    counterexample = Some(Counterexample {
                        at: coords(&["k", "n", "r"], &[k, n, 1]),
                        lhs: BigInt::from(c).into(),
                        rhs: BigInt::from(0).into(),
                    });
                    break 'base;
                }
            }
        }
    }
    // Per-variable degree bound of the laws.
    let degree_bound = 2;
    Ok(ProofReport::conclude(
        spec.id,
        Statement::ExponentLaw,
        &[("grid", LAW_GRID)],
        degree_bound,
        points,
        counterexample,
    ))
}

/// Checks `f(n,k)^r = sum_j a_j f(n,j)` for `n = 0..=n_max`; proved when
/// `n_max` reaches the degree of both sides.
pub fn verify_expansion_classical(
    spec: &FamilySpec,
    table: &ClassicalTable,
    n_max: usize,
) -> Result<ProofReport> {
    let (k, r) = (table.k, table.r);
    let top_degree = table
        .entries
        .keys()
        .map(|&j| spec.deg_f(j))
        .max()
        .unwrap_or(0);
    let bound = (r * spec.deg_f(k)).max(top_degree);
    let mut counterexample = None;
    for n in 0..=n_max as u64 {
        let lhs = BigRat::from_integer(spec.eval_f_int(n, k)?.pow(r as u32));
        let mut rhs = BigRat::default();
        for (j, a) in &table.entries {
            rhs += a * BigRat::from_integer(spec.eval_f_int(n, *j)?);
        }
        if lhs != rhs {
            counterexample = Some(Counterexample {
                at: at_n(n as i64),
                lhs: Value::Rat(lhs),
                rhs: Value::Rat(rhs),
            });
            break;
        }
    }
    Ok(ProofReport::conclude(
        spec.id,
        Statement::Expansion,
        &[("k", k as i64), ("r", r as i64), ("n_max", n_max as i64)],
        bound,
        n_max + 1,
        counterexample,
    ))
}

/// Checks `f(n,k)^r = sum_j q^C f(n,j) P_j(q)` for `n = 0..=n_max`.
pub fn verify_expansion_q(spec: &FamilySpec, table: &QTable, n_max: usize) -> Result<ProofReport> {
    let (k, r) = (table.k, table.r);
    let terms = table
        .entries
        .keys()
        .map(|&j| Ok((j, n_slope(spec.id, |n| spec.exp_c(k, j, r, n))?)))
        .collect::<Result<Vec<_>>>()?;
    let bound = x_window(spec, r * spec.deg_f(k), &terms);
    let mut counterexample = None;
    for n in 0..=n_max as u64 {
        let lhs = spec.eval_f_q(n, k)?.pow(r as u32);
        let rhs = crate::coefficients::q_expansion_at(spec, k, r, n as i64, &table.entries)?;
        if lhs != rhs {
            counterexample = Some(Counterexample {
                at: at_n(n as i64),
                lhs: Value::Laurent(lhs),
                rhs: Value::Laurent(rhs),
            });
            break;
        }
    }
    Ok(ProofReport::conclude(
        spec.id,
        Statement::Expansion,
        &[("k", k as i64), ("r", r as i64), ("n_max", n_max as i64)],
        bound,
        n_max + 1,
        counterexample,
    ))
}

/// Builds the coefficient table for `(family, k, r)` and checks its expansion.
/// Families without closed-form constants use the direct solve.
pub fn verify_expansion(
    spec: &FamilySpec,
    k: usize,
    r: usize,
    n_max: usize,
) -> Result<ProofReport> {
    match spec.kind() {
        Kind::Classical => {
            let table = if spec.has_closed_s() {
                a_table_recursive(spec, k, r)?
            } else {
                a_table_direct(spec, k, r)?
            };
            verify_expansion_classical(spec, &table, n_max)
        }
        Kind::Q => verify_expansion_q(spec, &p_table_q(spec, k, r)?, n_max),
    }
}

/// Product identities over `0..=kmax x 0..=imax`, in `(k, i)` order.
pub fn verify_classical_grid(
    spec: &FamilySpec,
    kmax: usize,
    imax: usize,
    jobs: usize,
) -> Result<Vec<ProofReport>> {
    map_cells(&ki_cells(kmax, imax), jobs, |&(k, i)| {
        verify_product_identity_classical(spec, k, i)
    })
    .into_iter()
    .collect()
}

/// q product identities over `0..=kmax x 0..=imax`, in `(k, i)` order.
pub fn verify_q_grid(
    spec: &FamilySpec,
    kmax: usize,
    imax: usize,
    jobs: usize,
) -> Result<Vec<ProofReport>> {
    map_cells(&ki_cells(kmax, imax), jobs, |&(k, i)| {
        verify_product_identity_q(spec, k, i)
    })
    .into_iter()
    .collect()
}
