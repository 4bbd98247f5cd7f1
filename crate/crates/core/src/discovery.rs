//! Experimental side: recover structure constants from raw values of
//! `f(n, k)`, test integrality of the dilated family `binom(n+dk, k)`, and fit
//! polynomial-coefficient recurrences to one-dimensional slices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coefficients::{a_table_direct, a_table_recursive, check_integrality};
use crate::exact::{
    as_integer, binomial, is_zero_rat, nullspace_exact, solve_exact, BigRat, Degenerate, Matrix,
};
use crate::families::{ClassicalConstants, FamilyId, FamilySpec};
use crate::grid::map_cells;
use crate::{Error, Result};

/// Rows beyond the unknown count that every solve must also satisfy.
pub const CONSISTENCY_MARGIN: usize = 3;

/// Held-out tail of a sequence that a fitted recurrence must annihilate
/// without having seen it.
pub const HOLDOUT: usize = 5;

/// Structure constants `S(k, j, i)` for one `(k, i)`, recovered by solving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscoveredS {
    pub tag: String,
    pub k: usize,
    pub i: usize,
    /// Nonzero values only; the first and last keys bound the support.
    pub values: BTreeMap<usize, BigRat>,
    /// Sample rows beyond the unknown count that the solution satisfied.
    pub consistency_margin: usize,
}

impl DiscoveredS {
    pub fn support(&self) -> Option<RangeInclusive<usize>> {
        let lo = *self.values.keys().next()?;
        let hi = *self.values.keys().next_back()?;
        Some(lo..=hi)
    }

    pub fn integral(&self) -> bool {
        self.values.values().all(|v| v.denom().is_one())
    }

    pub fn get(&self, j: usize) -> BigRat {
        self.values.get(&j).cloned().unwrap_or_default()
    }
}

/// Solves `f(n,i) f(n,k) = sum_{j in support} s_j f(n,j)` exactly.
///
/// The caller promises that `f(., j)` is a polynomial in `n` whose degree
/// strictly increases with `j`, which makes any solution unique. Rows where
/// every basis value vanishes carry no information and are skipped; if the
/// rows gathered are still rank deficient, more are added.
pub fn discover_s(
    f: &(dyn Fn(u64, usize) -> BigInt + Sync),
    tag: &str,
    k: usize,
    i: usize,
    support_hint: Option<RangeInclusive<usize>>,
) -> Result<DiscoveredS> {
    let range = support_hint.unwrap_or(0..=i + k);
    let js: Vec<usize> = range.clone().collect();
    let unknowns = js.len();
    let wanted = unknowns + CONSISTENCY_MARGIN;
    let cap = 4 * wanted + 20;
    let mut matrix = Matrix::zeros(0, unknowns);
    let mut rhs = Vec::new();
    let mut n = 0u64;
    let mut target = wanted;
    loop {
        while matrix.rows() < target && n < cap as u64 {
            let row: Vec<BigInt> = js.iter().map(|&j| f(n, j)).collect();
            let product = f(n, i) * f(n, k);
            if row.iter().any(|v| !v.is_zero()) || !product.is_zero() {
                matrix.push_row(row.into_iter().map(BigRat::from_integer).collect());
                rhs.push(BigRat::from_integer(product));
            }
            n += 1;
        }
        match solve_exact(&matrix, &rhs) {
            Ok(sol) => {
                let values = js
                    .iter()
                    .zip(sol)
                    .filter(|(_, v)| !is_zero_rat(v))
                    .map(|(j, v)| (*j, v))
                    .collect();
                return Ok(DiscoveredS {
                    tag: tag.to_string(),
                    k,
                    i,
                    values,
                    consistency_margin: matrix.rows() - unknowns,
                });
            }
            Err(Degenerate::Underdetermined { .. }) if (n as usize) < cap => {
                target = matrix.rows() + unknowns;
            }
            Err(source) => {
                return Err(Error::Solve {
                    context: format!(
                        "{tag}: no such expansion of f(n,{i}) f(n,{k}) over j in {range:?}"
                    ),
                    source,
                })
            }
        }
    }
}

/// Evaluator for the dilated family `binom(n + d k, k)`.
pub fn dilated_f(d: u32) -> impl Fn(u64, usize) -> BigInt + Sync {
    move |n, k| binomial(n + d as u64 * k as u64, k as i64)
}

fn classical_f(spec: FamilySpec) -> impl Fn(u64, usize) -> BigInt + Sync {
    move |n, k| spec.eval_f_int(n, k).expect("classical family")
}

/// A grid of discovered constants usable wherever closed forms are.
#[derive(Clone, Debug)]
pub struct DiscoveredTable {
    pub family: FamilyId,
    pub cells: BTreeMap<(usize, usize), DiscoveredS>,
}

impl ClassicalConstants for DiscoveredTable {
    fn family(&self) -> FamilyId {
        self.family
    }

    fn constant(&self, k: usize, j: usize, i: usize) -> Result<BigRat> {
        self.cells
            .get(&(k, i))
            .map(|c| c.get(j))
            .ok_or_else(|| Error::InvalidArgument(format!("S({k},*,{i}) was not discovered")))
    }

    #[allow(clippy::reversed_empty_ranges)]
    fn support(&self, k: usize, i: usize) -> RangeInclusive<usize> {
        self.cells
            .get(&(k, i))
            .and_then(DiscoveredS::support)
            .unwrap_or(1..=0)
    }
}

/// Per-cell persistence for long scans; the command line backs it with the
/// cache directory.
pub trait CellStore: Sync {
    fn load(&self, tag: &str, k: usize, i: usize) -> Option<DiscoveredS>;
    fn store(&self, cell: &DiscoveredS);
}

/// Keeps nothing.
pub struct NoStore;

impl CellStore for NoStore {
    fn load(&self, _: &str, _: usize, _: usize) -> Option<DiscoveredS> {
        None
    }

    fn store(&self, _: &DiscoveredS) {}
}

fn discover_cells(
    d: u32,
    cells: &[(usize, usize)],
    jobs: usize,
    store: &dyn CellStore,
) -> Result<BTreeMap<(usize, usize), DiscoveredS>> {
    let tag = FamilyId::Dilated { d }.to_string();
    let f = dilated_f(d);
    map_cells(cells, jobs, |&(k, i)| {
        if let Some(hit) = store.load(&tag, k, i) {
            return Ok(((k, i), hit));
        }
        let cell = discover_s(&f, &tag, k, i, None)?;
        store.store(&cell);
        Ok(((k, i), cell))
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub k: usize,
    pub j: usize,
    pub i: usize,
    pub expected: BigInt,
    pub found: BigRat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RediscoveryReport {
    pub family: FamilyId,
    pub cells_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl RediscoveryReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recovers `S` from `f` alone on the `(k, i)` grid and compares it with
/// the closed form everywhere, including zeros inside the solve window.
pub fn rediscover_closed_forms(
    spec: &FamilySpec,
    kmax: usize,
    imax: usize,
    jobs: usize,
) -> Result<RediscoveryReport> {
    if !spec.has_closed_s() {
        return Err(Error::Capability {
            family: spec.id.to_string(),
            what: "closed-form S(k,j,i)",
            hint: "use integrality_scan for this family",
        });
    }
    let f = classical_f(*spec);
    let tag = spec.id.to_string();
    let cells = crate::grid::ki_cells(kmax, imax);
    let per_cell = map_cells(&cells, jobs, |&(k, i)| -> Result<Vec<Mismatch>> {
        // Start at j = 0 so the lower support bound is found, not assumed.
        let hint = 0..=*spec.j_support(k, i).end();
        let found = discover_s(&f, &tag, k, i, Some(hint.clone()))?;
        let mut bad = Vec::new();
        for j in hint {
            let expected = spec.eval_s_int(k, j, i)?;
            let got = found.get(j);
            if BigRat::from_integer(expected.clone()) != got {
                bad.push(Mismatch {
                    k,
                    j,
                    i,
                    expected,
                    found: got,
                });
            }
        }
        Ok(bad)
    });
    let mut mismatches = Vec::new();
    for cell in per_cell {
        mismatches.extend(cell?);
    }
    Ok(RediscoveryReport {
        family: spec.id,
        cells_checked: cells.len(),
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCheck {
    pub k: usize,
    pub r: usize,
    pub integral: bool,
    pub agrees_with_direct: bool,
}

/// Outcome of the integrality scan for `binom(n + d k, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub d: u32,
    pub kmax: usize,
    pub imax: usize,
    pub rmax: usize,
    /// The `(k, i)` grid in lexicographic order.
    pub cells: Vec<DiscoveredS>,
    /// Cells outside the grid that the recursion up to `rmax` needed.
    pub extra_cells: usize,
    pub tables: Vec<TableCheck>,
}

impl ScanReport {
    pub fn non_integral_cells(&self) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .filter(|c| !c.integral())
            .map(|c| (c.k, c.i))
            .collect()
    }

    pub fn all_integral(&self) -> bool {
        self.cells.iter().all(DiscoveredS::integral) && self.tables.iter().all(|t| t.integral)
    }

    pub fn all_agree(&self) -> bool {
        self.tables.iter().all(|t| t.agrees_with_direct)
    }

    pub fn cell(&self, k: usize, i: usize) -> Option<&DiscoveredS> {
        self.cells.iter().find(|c| c.k == k && c.i == i)
    }
}

/// Discovers `S_d` on `k <= kmax, i <= imax`, then builds `a^(r)_{d,k,j}`
/// for `r <= rmax` by the structure-constant recursion with the discovered
/// values and compares each table with a direct solve.
///
/// Negative findings (non-integral values, disagreement) are reported, not
/// raised.
pub fn integrality_scan(
    d: u32,
    kmax: usize,
    imax: usize,
    rmax: usize,
    jobs: usize,
    store: &dyn CellStore,
) -> Result<ScanReport> {
    if rmax == 0 {
        return Err(Error::InvalidArgument("rmax must be at least 1".into()));
    }
    // The recursion for a^(r+1)_{k,*} reads S(k, *, i) for i in supp a^(r)_{k,*} within [0, r k].
    let mut needed: BTreeSet<(usize, usize)> =
        crate::grid::ki_cells(kmax, imax).into_iter().collect();
    for k in 0..=kmax {
        for i in 0..=(rmax - 1) * k {
            needed.insert((k, i));
        }
    }
    let needed: Vec<(usize, usize)> = needed.into_iter().collect();
    let discovered = discover_cells(d, &needed, jobs, store)?;
    let table = DiscoveredTable {
        family: FamilyId::Dilated { d },
        cells: discovered,
    };
    let spec = FamilySpec::new(FamilyId::Dilated { d });
    let kr: Vec<(usize, usize)> = (0..=kmax)
        .flat_map(|k| (1..=rmax).map(move |r| (k, r)))
        .collect();
    let tables = map_cells(&kr, jobs, |&(k, r)| -> Result<TableCheck> {
        let rec = a_table_recursive(&table, k, r)?;
        let dir = a_table_direct(&spec, k, r)?;
        Ok(TableCheck {
            k,
            r,
            integral: check_integrality(&rec).integral(),
            agrees_with_direct: rec.same_entries(&dir),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let grid: Vec<DiscoveredS> = crate::grid::ki_cells(kmax, imax)
        .into_iter()
        .map(|ki| table.cells[&ki].clone())
        .collect();
    Ok(ScanReport {
        d,
        kmax,
        imax,
        rmax,
        extra_cells: table.cells.len() - grid.len(),
        cells: grid,
        tables,
    })
}

/// `sum_{l <= order} p_l(m) t(m + l) = 0` with integer polynomial `p_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceCandidate {
    pub order: usize,
    pub coeff_degree: usize,
    /// `coefficients[l][e]` is the coefficient of `m^e` in `p_l`.
    pub coefficients: Vec<Vec<BigInt>>,
    pub fit_window: RangeInclusive<usize>,
    pub verify_window: RangeInclusive<usize>,
}

impl RecurrenceCandidate {
    fn p(&self, l: usize, m: usize) -> BigInt {
        let mm = BigInt::from(m);
        self.coefficients[l]
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &mm + c)
    }

    /// `sum_l p_l(m) t(m + l)`; `None` past the end of the data.
    pub fn residual(&self, seq: &[BigInt], m: usize) -> Option<BigInt> {
        if m + self.order >= seq.len() {
            return None;
        }
        Some((0..=self.order).map(|l| self.p(l, m) * &seq[m + l]).sum())
    }

    pub fn annihilates(&self, seq: &[BigInt], window: RangeInclusive<usize>) -> bool {
        window
            .into_iter()
            .all(|m| self.residual(seq, m).is_some_and(|r| r.is_zero()))
    }
}

fn poly_to_string(c: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (e, x) in c.iter().enumerate().rev() {
        if x.is_zero() {
            continue;
        }
        let mag = x.abs();
        let sign = if x.is_negative() { "-" } else { "+" };
        let body = match (e, mag.is_one()) {
            (0, _) => mag.to_string(),
            (1, true) => "m".to_string(),
            (1, false) => format!("{mag}m"),
            (_, true) => format!("m^{e}"),
            (_, false) => format!("{mag}m^{e}"),
        };
        parts.push((sign, body));
    }
    let mut s = String::new();
    for (t, (sign, body)) in parts.iter().enumerate() {
        match (t, *sign) {
            (0, "-") => s.push('-'),
            (0, _) => {}
            (_, sg) => s.push_str(&format!(" {sg} ")),
        }
        s.push_str(body);
    }
    s
}

impl fmt::Display for RecurrenceCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in (0..=self.order).rev() {
            let c = &self.coefficients[l];
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let shift = if l == 0 {
                "m".to_string()
            } else {
                format!("m+{l}")
            };
            write!(f, "({})*t({shift})", poly_to_string(c))?;
        }
        f.write_str(" = 0")
    }
}

/// Clears denominators, removes content, and makes the leading coefficient
/// of the highest-index polynomial positive.
fn normalize(v: &[BigRat], order: usize, degree: usize) -> Option<Vec<Vec<BigInt>>> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    let mut polys: Vec<Vec<BigInt>> = ints
        .chunks(degree + 1)
        .map(|c| c.iter().map(|x| x / &g).collect())
        .collect();
    debug_assert_eq!(polys.len(), order + 1);
    let lead = polys[order].iter().rev().find(|x| !x.is_zero())?.clone();
    if lead.is_negative() {
        for p in &mut polys {
            for x in p.iter_mut() {
                *x = -&*x;
            }
        }
    }
    Some(polys)
}

/// Fits the smallest `(order, degree)` recurrence, in lexicographic order,
/// whose kernel vector also annihilates the held-out last [`HOLDOUT`]
/// admissible indices.
pub fn guess_recurrence(
    seq: &[BigInt],
    max_order: usize,
    max_coeff_degree: usize,
) -> Option<RecurrenceCandidate> {
    for order in 1..=max_order {
        if seq.len() <= order {
            break;
        }
        let admissible = seq.len() - order;
        for degree in 0..=max_coeff_degree {
            let unknowns = (order + 1) * (degree + 1);
            if admissible < HOLDOUT + unknowns + 1 {
                continue;
            }
            let fit = 0..=admissible - HOLDOUT - 1;
            let verify = admissible - HOLDOUT..=admissible - 1;
            let rows = fit
                .clone()
                .map(|m| {
                    let mut row = Vec::with_capacity(unknowns);
                    for l in 0..=order {
                        let mut pow = BigInt::one();
                        for _ in 0..=degree {
                            row.push(BigRat::from_integer(&pow * &seq[m + l]));
                            pow *= m;
                        }
                    }
                    row
                })
                .collect();
            for v in nullspace_exact(&Matrix::from_rows(rows)) {
                let Some(coefficients) = normalize(&v, order, degree) else {
                    continue;
                };
                let nonzero = |p: &Vec<BigInt>| p.iter().any(|x| !x.is_zero());
                if !nonzero(&coefficients[0]) || !nonzero(&coefficients[order]) {
                    continue;
                }
                let cand = RecurrenceCandidate {
                    order,
                    coeff_degree: degree,
                    coefficients,
                    fit_window: fit.clone(),
                    verify_window: verify.clone(),
                };
                if cand.annihilates(seq, fit.clone()) && cand.annihilates(seq, verify.clone()) {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// A one-dimensional slice of the `S_d` table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    /// `t -> S(t, t + j_offset, i)`.
    AlongK { j_offset: i64, i: usize },
    /// `t -> S(k, t + j_offset, t)`.
    AlongI { k: usize, j_offset: i64 },
    /// `t -> S(k, t, i)`.
    AlongJ { k: usize, i: usize },
}

impl Slice {
    /// First admissible index and the `(k, j, i)` of term `t`.
    fn start(&self) -> usize {
        match *self {
            Slice::AlongK { j_offset, .. } | Slice::AlongI { j_offset, .. } => {
                (-j_offset).max(0) as usize
            }
            Slice::AlongJ { .. } => 0,
        }
    }

    fn index(&self, t: usize) -> (usize, usize, usize) {
        match *self {
            Slice::AlongK { j_offset, i } => (t, (t as i64 + j_offset) as usize, i),
            Slice::AlongI { k, j_offset } => (k, (t as i64 + j_offset) as usize, t),
            Slice::AlongJ { k, i } => (k, t, i),
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slice::AlongK { j_offset, i } => write!(f, "S(t, t{j_offset:+}, {i})"),
            Slice::AlongI { k, j_offset } => write!(f, "S({k}, t{j_offset:+}, t)"),
            Slice::AlongJ { k, i } => write!(f, "S({k}, t, {i})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Every term of the slice is zero.
    Degenerate,
    /// Some term is not an integer, so the slice is not an integer sequence.
    NonIntegral,
    Found(RecurrenceCandidate),
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub d: u32,
    pub slice: Slice,
    pub first_index: usize,
    pub terms: Vec<BigRat>,
    pub outcome: ProbeOutcome,
    /// `d = 0, 1` have first-order closed forms and act as controls.
    pub is_control: bool,
}

impl ProbeReport {
    pub fn minimal_order(&self) -> Option<usize> {
        match &self.outcome {
            ProbeOutcome::Found(c) => Some(c.order),
            _ => None,
        }
    }

    pub fn first_order_found(&self) -> bool {
        self.minimal_order() == Some(1)
    }

    /// A control slice without a first-order recurrence contradicts the
    /// known closed forms.
    pub fn control_failed(&self) -> bool {
        self.is_control && !self.first_order_found()
    }
}

/// Extracts a slice of the discovered `S_d` table and fits a recurrence.
/// For `d >= 2` the result is evidence only; for the `d = 0, 1` controls a
/// first-order recurrence is expected.
#[allow(clippy::too_many_arguments)]
pub fn recurrence_probe(
    d: u32,
    slice: Slice,
    length: usize,
    max_order: usize,
    max_coeff_degree: usize,
    jobs: usize,
    store: &dyn CellStore,
) -> Result<ProbeReport> {
    let first = slice.start();
    let idx: Vec<(usize, usize, usize)> = (first..first + length).map(|t| slice.index(t)).collect();
    let cells: Vec<(usize, usize)> = idx
        .iter()
        .map(|&(k, _, i)| (k, i))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let discovered = discover_cells(d, &cells, jobs, store)?;
    let terms: Vec<BigRat> = idx
        .iter()
        .map(|&(k, j, i)| discovered[&(k, i)].get(j))
        .collect();
    let outcome = if terms.iter().all(is_zero_rat) {
        ProbeOutcome::Degenerate
    } else if let Some(ints) = terms.iter().map(as_integer).collect::<Option<Vec<_>>>() {
        match guess_recurrence(&ints, max_order, max_coeff_degree) {
            Some(c) => ProbeOutcome::Found(c),
            None => ProbeOutcome::NotFound,
        }
    } else {
        ProbeOutcome::NonIntegral
    };
    Ok(ProbeReport {
        d,
        slice,
        first_index: first,
        terms,
        outcome,
        is_control: d <= 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vals(pairs: &[(usize, i64)]) -> BTreeMap<usize, BigRat> {
        pairs.iter().map(|&(j, v)| (j, rat(v))).collect()
    }

    fn ints(xs: &[i64]) -> Vec<Vec<BigInt>> {
        vec![xs.iter().map(|&x| BigInt::from(x)).collect()]
    }

    #[test]
    fn discover_examples() {
        let choose = classical_f(FamilySpec::new(FamilyId::Choose));
        let s = discover_s(&choose, "C-2.2", 1, 1, None).unwrap();
        assert_eq!(s.values, vals(&[(1, 1), (2, 2)]));
        assert_eq!(s.support(), Some(1..=2));
        assert!(s.integral());
        assert!(s.consistency_margin >= CONSISTENCY_MARGIN);

        let s = discover_s(&dilated_f(2), "D:d=2", 1, 1, None).unwrap();
        assert_eq!(s.values, vals(&[(0, -2), (1, -3), (2, 2)]));
        assert_eq!(s.support(), Some(0..=2));

        for k in 0..5 {
            let s = discover_s(&dilated_f(3), "D:d=3", k, 0, None).unwrap();
            assert_eq!(s.values, vals(&[(k, 1)]));
        }
    }

    #[test]
    fn discovery_is_deterministic() {
        let a = discover_s(&dilated_f(3), "D:d=3", 3, 2, None).unwrap();
        let b = discover_s(&dilated_f(3), "D:d=3", 3, 2, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_qualifying_shape_has_no_expansion() {
        // binom(n, 2k) is not closed under products in its own span.
        let f = |n: u64, k: usize| binomial(n, 2 * k as i64);
        let err = discover_s(&f, "ad-hoc", 1, 1, None).unwrap_err();
        assert!(err.to_string().contains("no such expansion"), "{err}");
    }

    #[test]
    fn shifted_family_needs_the_rank_fallback() {
        // Every basis value vanishes for n < c, so those rows are skipped.
        let spec = FamilySpec::new(FamilyId::ShiftedSchmidt { c: 2 });
        let s = discover_s(&classical_f(spec), "C-2.1.2:c=2", 1, 2, Some(0..=5)).unwrap();
        for j in 0..=5 {
            assert_eq!(
                s.get(j),
                BigRat::from_integer(spec.eval_s_int(1, j, 2).unwrap())
            );
        }
    }

    #[test]
    fn rediscovery_small_grid() {
        for id in [
            FamilyId::Schmidt,
            FamilyId::Multiset,
            FamilyId::ShiftedSchmidt { c: 2 },
        ] {
            let rep = rediscover_closed_forms(&FamilySpec::new(id), 4, 4, 2).unwrap();
            assert!(rep.agrees(), "{id}: {:?}", rep.mismatches);
            assert_eq!(rep.cells_checked, 25);
        }
    }

    #[test]
    fn scan_controls_and_golden_row() {
        let rep = integrality_scan(0, 4, 4, 3, 2, &NoStore).unwrap();
        for c in &rep.cells {
            for j in 0..=c.k + c.i {
                let closed = FamilySpec::new(FamilyId::Choose)
                    .eval_s_int(c.k, j, c.i)
                    .unwrap();
                assert_eq!(c.get(j), BigRat::from_integer(closed));
            }
        }
        assert!(rep.all_integral() && rep.all_agree());

        let rep = integrality_scan(2, 2, 2, 2, 1, &NoStore).unwrap();
        assert_eq!(
            rep.cell(1, 1).unwrap().values,
            vals(&[(0, -2), (1, -3), (2, 2)])
        );
        let t = rep.tables.iter().find(|t| t.k == 1 && t.r == 2).unwrap();
        assert!(t.agrees_with_direct && t.integral);
    }

    #[test]
    fn scan_reads_from_store() {
        use std::sync::Mutex;
        struct Memory(
            Mutex<BTreeMap<(String, usize, usize), DiscoveredS>>,
            Mutex<usize>,
        );
        impl CellStore for Memory {
            fn load(&self, tag: &str, k: usize, i: usize) -> Option<DiscoveredS> {
                let hit = self
                    .0
                    .lock()
                    .unwrap()
                    .get(&(tag.to_string(), k, i))
                    .cloned();
                if hit.is_some() {
                    *self.1.lock().unwrap() += 1;
                }
                hit
            }
            fn store(&self, cell: &DiscoveredS) {
                self.0
                    .lock()
                    .unwrap()
                    .insert((cell.tag.clone(), cell.k, cell.i), cell.clone());
            }
        }
        let mem = Memory(Mutex::new(BTreeMap::new()), Mutex::new(0));
        let first = integrality_scan(3, 3, 3, 2, 2, &mem).unwrap();
        assert_eq!(*mem.1.lock().unwrap(), 0);
        let stored = mem.0.lock().unwrap().len();
        let second = integrality_scan(3, 3, 3, 2, 2, &mem).unwrap();
        assert_eq!(*mem.1.lock().unwrap(), stored);
        assert_eq!(first, second);
    }

    #[test]
    fn central_binomial_recurrence() {
        let seq: Vec<BigInt> = (0..30u64).map(|m| binomial(2 * m, m as i64)).collect();
        let c = guess_recurrence(&seq, 1, 1).unwrap();
        assert_eq!(c.order, 1);
        assert_eq!(c.coeff_degree, 1);
        assert_eq!(c.coefficients[1], ints(&[1, 1])[0]);
        assert_eq!(c.coefficients[0], ints(&[-2, -4])[0]);
        assert_eq!(c.to_string(), "(m + 1)*t(m+1) + (-4m - 2)*t(m) = 0");
        assert!(c.annihilates(&seq, c.verify_window.clone()));
    }

    #[test]
    fn constant_sequence() {
        let seq = vec![BigInt::one(); 20];
        let c = guess_recurrence(&seq, 2, 2).unwrap();
        assert_eq!((c.order, c.coeff_degree), (1, 0));
        assert_eq!(
            c.coefficients,
            vec![ints(&[-1])[0].clone(), ints(&[1])[0].clone()]
        );
    }

    #[test]
    fn random_sequence_has_no_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(20_24);
        let seq: Vec<BigInt> = (0..30)
            .map(|_| BigInt::from(rng.gen_range(-1000i64..1000)))
            .collect();
        assert_eq!(guess_recurrence(&seq, 2, 2), None);
    }

    #[test]
    fn planted_recurrences_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let order = rng.gen_range(1..=2usize);
            let degree = rng.gen_range(0..=2usize);
            // Monic top polynomial keeps the sequence integral.
            let mut lower: Vec<Vec<i64>> = (0..order)
                .map(|_| (0..=degree).map(|_| rng.gen_range(-3i64..=3)).collect())
                .collect();
            // p_0 must not vanish at any m, or the recurrence loses information.
            lower[0][0] = 100;
            let mut seq: Vec<BigInt> = (0..order)
                .map(|_| BigInt::from(rng.gen_range(1i64..5)))
                .collect();
            for m in 0..40 - order {
                let mut acc = BigInt::zero();
                for (l, p) in lower.iter().enumerate() {
                    let pm: i64 = p.iter().rev().fold(0, |a, c| a * m as i64 + c);
                    acc += BigInt::from(pm) * &seq[m + l];
                }
                seq.push(-acc);
            }
            let c = guess_recurrence(&seq, 2, 2).expect("planted recurrence not found");
            let all = 0..=seq.len() - 1 - c.order;
            assert!(c.annihilates(&seq, all), "{c}");
            assert!(c.order <= order);
        }
    }

    #[test]
    fn control_probes_are_first_order() {
        let rep = recurrence_probe(
            1,
            Slice::AlongK { j_offset: 1, i: 1 },
            20,
            2,
            2,
            2,
            &NoStore,
        )
        .unwrap();
        assert_eq!(rep.terms[..4], [rat(1), rat(2), rat(3), rat(4)]);
        assert!(rep.first_order_found(), "{:?}", rep.outcome);
        assert!(!rep.control_failed());
        for slice in [
            Slice::AlongK { j_offset: 1, i: 1 },
            Slice::AlongK { j_offset: 0, i: 2 },
            Slice::AlongI { k: 2, j_offset: 1 },
        ] {
            let rep = recurrence_probe(0, slice, 20, 2, 2, 2, &NoStore).unwrap();
            assert!(rep.first_order_found(), "{slice}: {:?}", rep.outcome);
        }
    }

    #[test]
    fn degenerate_slice() {
        let rep = recurrence_probe(
            0,
            Slice::AlongK { j_offset: 5, i: 1 },
            12,
            1,
            1,
            1,
            &NoStore,
        )
        .unwrap();
        assert_eq!(rep.outcome, ProbeOutcome::Degenerate);
    }
}
