//! Expansion coefficient tables.
//!
//! `a^(r)_{k,j}` satisfies `f(n,k)^r = sum_j a^(r)_{k,j} f(n,j)` and
//! `P^(r)_{k,j}(q)` satisfies `f(n,k)^r = sum_j q^C f(n,j) P^(r)_{k,j}(q)`.
//! Each is built two ways: the structure-constant recursion starting from the
//! delta table at `r = 1`, and an independent oracle that solves the defining
//! expansion directly at sample points.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{as_integer, binomial, is_zero_rat, solve_exact, BigRat, Matrix, QLaurent};
use crate::families::{ClassicalConstants, FamilyId, FamilySpec, Kind};
use crate::grid::map_cells;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Recursive,
    DirectOracle,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Recursive => "recursive",
            Provenance::DirectOracle => "direct-oracle",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nonzero coefficients `j -> value` for one `(family, k, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable<V> {
    pub family: FamilyId,
    pub k: usize,
    pub r: usize,
    pub provenance: Provenance,
    pub entries: BTreeMap<usize, V>,
}

pub type ClassicalTable = CoeffTable<BigRat>;
pub type QTable = CoeffTable<QLaurent>;

impl<V: PartialEq> CoeffTable<V> {
    /// Entry-wise equality, ignoring provenance.
    pub fn same_entries(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<V> CoeffTable<V> {
    fn new(family: FamilyId, k: usize, r: usize, provenance: Provenance) -> Self {
        Self {
            family,
            k,
            r,
            provenance,
            entries: BTreeMap::new(),
        }
    }
}

impl QTable {
    /// Every entry specialized at `q = 1`.
    pub fn at_q_one(&self) -> ClassicalTable {
        CoeffTable {
            family: self.family.paired_classical().unwrap_or(self.family),
            k: self.k,
            r: self.r,
            provenance: self.provenance,
            entries: self
                .entries
                .iter()
                .map(|(j, p)| (*j, BigRat::from_integer(p.eval_at_one())))
                .filter(|(_, v)| !is_zero_rat(v))
                .collect(),
        }
    }
}

fn require_r(r: usize) -> Result<()> {
    if r == 0 {
        Err(Error::InvalidArgument("r must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `a^(r)_{k,j}` by the recursion `a^(r+1)_{k,j} = sum_i S(k,j,i) a^(r)_{k,i}`
/// from `a^(1)_{k,j} = [j = k]`.
///
/// Works with any source of structure constants, including ones recovered by
/// [`crate::discovery`].
pub fn a_table_recursive<S: ClassicalConstants + ?Sized>(
    consts: &S,
    k: usize,
    r: usize,
) -> Result<ClassicalTable> {
    require_r(r)?;
    let mut current: BTreeMap<usize, BigRat> = BTreeMap::from([(k, BigRat::one())]);
    for _ in 1..r {
        let mut next: BTreeMap<usize, BigRat> = BTreeMap::new();
        for (&i, a_i) in &current {
            for j in consts.support(k, i) {
                let s = consts.constant(k, j, i)?;
                if !is_zero_rat(&s) {
                    *next.entry(j).or_insert_with(BigRat::zero) += s * a_i;
                }
            }
        }
        next.retain(|_, v| !is_zero_rat(v));
        current = next;
    }
    let mut table = CoeffTable::new(consts.family(), k, r, Provenance::Recursive);
    table.entries = current;
    Ok(table)
}

/// `a^(r)_{k,j}` by solving the expansion directly.
///
/// Unknowns run over `j = 0..=top` where `top` is the largest basis index of
/// degree at most `r * deg_f(k)`; rows are sample points `n = c, c+1, ...`
/// (`c` the family shift) with two consistency rows beyond the unknown count.
pub fn a_table_direct(spec: &FamilySpec, k: usize, r: usize) -> Result<ClassicalTable> {
    require_r(r)?;
    if spec.kind() != Kind::Classical {
        return Err(Error::Capability {
            family: spec.id.to_string(),
            what: "classical direct solve",
            hint: "use p_table_q_direct for q-families",
        });
    }
    let top = spec.composed_top(k, r);
    let unknowns = top + 1;
    let start = spec.shift() as u64;
    let mut matrix = Matrix::zeros(0, unknowns);
    let mut rhs = Vec::new();
    for n in start..start + unknowns as u64 + 2 {
        let row = (0..unknowns)
            .map(|j| spec.eval_f_int(n, j).map(BigRat::from_integer))
            .collect::<Result<Vec<_>>>()?;
        matrix.push_row(row);
        rhs.push(BigRat::from_integer(spec.eval_f_int(n, k)?.pow(r as u32)));
    }
    let solution = solve_exact(&matrix, &rhs).map_err(|source| Error::Solve {
        context: format!("{}: direct expansion of f(n,{k})^{r}", spec.id),
        source,
    })?;
    let mut table = CoeffTable::new(spec.id, k, r, Provenance::DirectOracle);
    table.entries = solution
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !is_zero_rat(v))
        .collect();
    Ok(table)
}

/// `P^(r)_{k,j}(q)` by `P^(r+1)_{k,j} = sum_i q^B(k,j,i) S(k,j,i) P^(r)_{k,i}`
/// from `P^(1)_{k,j} = [j = k]`.
pub fn p_table_q(spec: &FamilySpec, k: usize, r: usize) -> Result<QTable> {
    require_r(r)?;
    let mut current: BTreeMap<usize, QLaurent> = BTreeMap::from([(k, QLaurent::one())]);
    for _ in 1..r {
        let mut next: BTreeMap<usize, QLaurent> = BTreeMap::new();
        for (&i, p_i) in &current {
            for j in spec.sum_range(k, i) {
                let s = spec.eval_s_q(k, j, i)?;
                if s.is_zero() {
                    continue;
                }
                let term = (&s * p_i).shift(spec.exp_b(k, j, i)?);
                let slot = next.entry(j).or_insert_with(QLaurent::zero);
                *slot = &*slot + &term;
            }
        }
        next.retain(|_, v| !v.is_zero());
        current = next;
    }
    let mut table = CoeffTable::new(spec.id, k, r, Provenance::Recursive);
    table.entries = current;
    Ok(table)
}

/// `q^C(k,j,r,n) f(n,j) P_j` summed over a table, at any integer `n`.
pub(crate) fn q_expansion_at(
    spec: &FamilySpec,
    k: usize,
    r: usize,
    n: i64,
    entries: &BTreeMap<usize, QLaurent>,
) -> Result<QLaurent> {
    let mut acc = QLaurent::zero();
    for (&j, p) in entries {
        let term = (&spec.eval_f_q_ext(n, j)? * p).shift(spec.exp_c(k, j, r, n)?);
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `P^(r)_{k,j}(q)` by back-substitution in the expansion itself.
///
/// The expansion is an identity of Laurent polynomials in `x = q^n`, so it
/// may be evaluated at any integer `n`. Points are taken in an order where
/// each one brings in exactly one new basis element `f(n, j)`, which is then
/// isolated by exact division; two further points check consistency.
pub fn p_table_q_direct(spec: &FamilySpec, k: usize, r: usize) -> Result<QTable> {
    require_r(r)?;
    let top = spec.composed_top(k, r);
    let mut entries: BTreeMap<usize, QLaurent> = BTreeMap::new();
    let power = |n: i64| -> Result<QLaurent> { Ok(spec.eval_f_q_ext(n, k)?.pow(r as u32)) };
    for j in 0..=top {
        let n = spec.triangular_point(j);
        let known = q_expansion_at(spec, k, r, n, &entries)?;
        let residual = &power(n)? - &known;
        let pivot = spec.eval_f_q_ext(n, j)?.shift(spec.exp_c(k, j, r, n)?);
        let p = residual.div_exact(&pivot).ok_or_else(|| {
            Error::Falsified(format!(
                "{}: back-substitution for P^({r})_{{{k},{j}}} at n={n} left a remainder",
                spec.id
            ))
        })?;
        if !p.is_zero() {
            entries.insert(j, p);
        }
    }
    let checks: Vec<i64> = match spec.id {
        FamilyId::QMultiset => vec![0, 1],
        _ => {
            let last = spec.triangular_point(top);
            vec![last + 1, last + 2]
        }
    };
    for n in checks {
        if q_expansion_at(spec, k, r, n, &entries)? != power(n)? {
            return Err(Error::Falsified(format!(
                "{}: back-substituted P^({r})_{{{k},*}} fails the expansion at n={n}",
                spec.id
            )));
        }
    }
    let mut table = CoeffTable::new(spec.id, k, r, Provenance::DirectOracle);
    table.entries = entries;
    Ok(table)
}

/// The numbers `c^(r)_0..=c^(r)_nmax` with
/// `sum_k f(n,k)^r = sum_k f(n,k) c^(r)_k`, `f(n,k) = binom(n,k) binom(n+k,k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchmidtRow {
    pub r: usize,
    pub values: Vec<BigRat>,
}

impl SchmidtRow {
    pub fn integral(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.denom().is_one()).collect()
    }

    pub fn all_integral(&self) -> bool {
        self.values.iter().all(|v| v.denom().is_one())
    }
}

/// Progressive solve: at step `n` the only new unknown is `c_n`, entering
/// with coefficient `f(n,n) = binom(2n,n)`.
pub fn schmidt_c(r: usize, nmax: usize) -> Result<SchmidtRow> {
    require_r(r)?;
    let f = FamilySpec::new(FamilyId::Schmidt);
    let mut values: Vec<BigRat> = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax as u64 {
        let mut lhs = BigInt::zero();
        let mut known = BigRat::zero();
        for k in 0..=n as usize {
            let fk = f.eval_f_int(n, k)?;
            lhs += fk.pow(r as u32);
            if let Some(c) = values.get(k) {
                known += BigRat::from_integer(fk) * c;
            }
        }
        let lead = binomial(2 * n, n as i64);
        values.push((BigRat::from_integer(lhs) - known) / BigRat::from_integer(lead));
    }
    Ok(SchmidtRow { r, values })
}

/// Integrality and polynomiality verdicts for one table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityReport {
    pub family: FamilyId,
    pub k: usize,
    pub r: usize,
    /// `j` values whose entry is not an integer (classical tables).
    pub non_integral: Vec<usize>,
    /// Lowest q-exponent over all entries (q tables only).
    pub min_exponent: Option<i64>,
    /// Whether the family asserts its `P` entries are polynomials in `q`.
    pub polynomiality_claimed: bool,
}

impl IntegralityReport {
    pub fn integral(&self) -> bool {
        self.non_integral.is_empty()
    }

    pub fn polynomial(&self) -> Option<bool> {
        self.min_exponent.map(|m| m >= 0)
    }

    /// False only when a checked claim fails.
    pub fn holds(&self) -> bool {
        self.integral() && (!self.polynomiality_claimed || self.polynomial() != Some(false))
    }
}

pub fn check_integrality(table: &ClassicalTable) -> IntegralityReport {
    IntegralityReport {
        family: table.family,
        k: table.k,
        r: table.r,
        non_integral: table
            .entries
            .iter()
            .filter(|(_, v)| as_integer(v).is_none())
            .map(|(j, _)| *j)
            .collect(),
        min_exponent: None,
        polynomiality_claimed: false,
    }
}

pub fn check_integrality_q(table: &QTable) -> IntegralityReport {
    IntegralityReport {
        family: table.family,
        k: table.k,
        r: table.r,
        non_integral: Vec::new(),
        min_exponent: table
            .entries
            .values()
            .filter_map(QLaurent::min_exponent)
            .min(),
        // B and C are nonnegative for these two, which forces polynomial P.
        polynomiality_claimed: matches!(table.family, FamilyId::QChoose | FamilyId::QMultiset),
    }
}

/// Result of comparing the recursive table with its direct oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub family: FamilyId,
    pub k: usize,
    pub r: usize,
    pub agree: bool,
}

fn kr_cells(kmax: usize, rmax: usize) -> Vec<(usize, usize)> {
    (0..=kmax)
        .flat_map(|k| (1..=rmax).map(move |r| (k, r)))
        .collect()
}

/// `a_table_recursive` against `a_table_direct` for `k <= kmax`, `1 <= r <= rmax`.
pub fn check_classical_oracles(
    spec: &FamilySpec,
    kmax: usize,
    rmax: usize,
    jobs: usize,
) -> Result<Vec<OracleCheck>> {
    map_cells(&kr_cells(kmax, rmax), jobs, |&(k, r)| {
        let rec = a_table_recursive(spec, k, r)?;
        let dir = a_table_direct(spec, k, r)?;
        Ok(OracleCheck {
            family: spec.id,
            k,
            r,
            agree: rec.same_entries(&dir),
        })
    })
    .into_iter()
    .collect()
}

/// `p_table_q` against `p_table_q_direct` for `k <= kmax`, `1 <= r <= rmax`.
pub fn check_q_oracles(
    spec: &FamilySpec,
    kmax: usize,
    rmax: usize,
    jobs: usize,
) -> Result<Vec<OracleCheck>> {
    map_cells(&kr_cells(kmax, rmax), jobs, |&(k, r)| {
        let rec = p_table_q(spec, k, r)?;
        let dir = p_table_q_direct(spec, k, r)?;
        Ok(OracleCheck {
            family: spec.id,
            k,
            r,
            agree: rec.same_entries(&dir),
        })
    })
    .into_iter()
    .collect()
}

/// Whether every entry lies in the expected support window.
pub fn within_support<V>(spec: &FamilySpec, table: &CoeffTable<V>) -> bool {
    let sup = spec.composed_support(table.k, table.r);
    table.entries.keys().all(|j| sup.contains(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use FamilyId::*;

    fn spec(id: FamilyId) -> FamilySpec {
        FamilySpec::new(id)
    }

    fn entries(pairs: &[(usize, i64)]) -> BTreeMap<usize, BigRat> {
        pairs.iter().map(|&(j, v)| (j, rat(v))).collect()
    }

    fn q(offset: i64, c: &[i64]) -> QLaurent {
        QLaurent::from_coeffs(offset, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn recursive_examples() {
        assert_eq!(
            a_table_recursive(&spec(Schmidt), 1, 2).unwrap().entries,
            entries(&[(1, 2), (2, 4)])
        );
        assert_eq!(
            a_table_recursive(&spec(Choose), 1, 2).unwrap().entries,
            entries(&[(1, 1), (2, 2)])
        );
        for id in [Schmidt, Choose, Multiset, ShiftedSchmidt { c: 2 }] {
            assert_eq!(
                a_table_recursive(&spec(id), 3, 1).unwrap().entries,
                entries(&[(3, 1)])
            );
        }
        assert!(a_table_recursive(&spec(Choose), 1, 0).is_err());
    }

    #[test]
    fn direct_examples() {
        let t = a_table_direct(&spec(Schmidt), 1, 2).unwrap();
        assert_eq!(t.entries, entries(&[(1, 2), (2, 4)]));
        assert_eq!(t.provenance, Provenance::DirectOracle);
        assert_eq!(
            a_table_direct(&spec(Multiset), 1, 2).unwrap().entries,
            entries(&[(1, -1), (2, 2)])
        );
        assert_eq!(
            a_table_direct(&spec(Dilated { d: 2 }), 1, 2)
                .unwrap()
                .entries,
            entries(&[(0, -2), (1, -3), (2, 2)])
        );
        assert!(a_table_direct(&spec(QChoose), 1, 2).is_err());
    }

    #[test]
    fn second_power_is_the_structure_constant_column() {
        for id in [Schmidt, ShiftedSchmidt { c: 1 }, Choose, Multiset] {
            let s = spec(id);
            for k in 0..=8 {
                let t = a_table_recursive(&s, k, 2).unwrap();
                for j in 0..=8 {
                    let expect = BigRat::from_integer(s.eval_s_int(k, j, k).unwrap());
                    assert_eq!(
                        t.entries.get(&j).cloned().unwrap_or_default(),
                        expect,
                        "{id} k={k} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn schmidt_examples() {
        let r1 = schmidt_c(1, 5).unwrap();
        assert_eq!(r1.values, vec![rat(1); 6]);
        let r2 = schmidt_c(2, 3).unwrap();
        assert_eq!(r2.values, vec![rat(1), rat(2), rat(10), rat(56)]);
        assert!(r2.all_integral());
        for r in 1..=4 {
            assert_eq!(schmidt_c(r, 0).unwrap().values, vec![rat(1)]);
        }
    }

    #[test]
    fn schmidt_numbers_are_column_sums_of_a_tables() {
        // sum_k f(n,k)^r = sum_j (sum_k a^(r)_{k,j}) f(n,j)
        let s = spec(Schmidt);
        for r in 1..=4 {
            let row = schmidt_c(r, 8).unwrap();
            let mut sums = vec![BigRat::zero(); 9];
            for k in 0..=8 {
                for (j, v) in a_table_recursive(&s, k, r).unwrap().entries {
                    if j <= 8 {
                        sums[j] += v;
                    }
                }
            }
            assert_eq!(row.values, sums, "r={r}");
        }
    }

    #[test]
    fn p_table_examples() {
        let t = p_table_q(&spec(QChoose), 1, 2).unwrap();
        assert_eq!(
            t.entries,
            BTreeMap::from([(1, q(0, &[1])), (2, q(1, &[1, 1]))])
        );
        let t = p_table_q(&spec(QSchmidt), 1, 2).unwrap();
        assert_eq!(t.entries[&1], q(-1, &[1, 1]));
        assert_eq!(t.entries[&2], q(0, &[1, 2, 1]));
        let t = p_table_q(&spec(QMultiset), 1, 1).unwrap();
        assert_eq!(t.entries, BTreeMap::from([(1, QLaurent::one())]));
    }

    #[test]
    fn p_direct_examples() {
        let s = spec(QChoose);
        assert!(p_table_q_direct(&s, 1, 2)
            .unwrap()
            .same_entries(&p_table_q(&s, 1, 2).unwrap()));
        let t = p_table_q_direct(&spec(QMultiset), 1, 2).unwrap();
        assert_eq!(
            t.entries,
            BTreeMap::from([(1, q(1, &[-1])), (2, q(0, &[1, 1]))])
        );
        for id in FamilyId::q_families() {
            let t = p_table_q_direct(&spec(id), 2, 1).unwrap();
            assert_eq!(t.entries, BTreeMap::from([(2, QLaurent::one())]), "{id}");
        }
    }

    #[test]
    fn integrality_reports() {
        let t = a_table_recursive(&spec(Schmidt), 3, 3).unwrap();
        assert!(check_integrality(&t).holds());
        let rep = check_integrality_q(&p_table_q(&spec(QSchmidt), 1, 2).unwrap());
        assert_eq!(rep.min_exponent, Some(-1));
        assert_eq!(rep.polynomial(), Some(false));
        assert!(rep.holds(), "Q-3.1.1 makes no polynomiality claim");
        let rep = check_integrality_q(&p_table_q(&spec(QMultiset), 2, 3).unwrap());
        assert!(rep.polynomiality_claimed);
        assert!(rep.holds());

        let mut bad = t.clone();
        bad.entries.insert(9, crate::exact::rat_frac(1, 2));
        assert_eq!(check_integrality(&bad).non_integral, vec![9]);
    }

    #[test]
    fn specialization_matches_classical_recursion() {
        for qid in [QSchmidt, QShiftedSchmidt { c: 1 }, QChoose, QMultiset] {
            let cid = qid.paired_classical().unwrap();
            for k in 0..=3 {
                for r in 1..=3 {
                    let qt = p_table_q(&spec(qid), k, r).unwrap().at_q_one();
                    let ct = a_table_recursive(&spec(cid), k, r).unwrap();
                    assert!(qt.same_entries(&ct), "{qid} k={k} r={r}");
                }
            }
        }
    }

    #[test]
    fn supports_stay_in_window() {
        for id in [Schmidt, ShiftedSchmidt { c: 2 }, Choose, Multiset] {
            for k in 0..=4 {
                for r in 1..=3 {
                    assert!(within_support(
                        &spec(id),
                        &a_table_recursive(&spec(id), k, r).unwrap()
                    ));
                }
            }
        }
        let t = a_table_direct(&spec(Dilated { d: 2 }), 2, 3).unwrap();
        assert!(within_support(&spec(Dilated { d: 2 }), &t));
    }
}
