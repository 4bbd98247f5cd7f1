//! JSON wire format. Every arbitrary-precision integer travels as a decimal
//! string; rationals as `"p/q"`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use schmidt_core::coefficients::{ClassicalTable, CoeffTable, Provenance, QTable, SchmidtRow};
use schmidt_core::discovery::{DiscoveredS, RecurrenceCandidate};
use schmidt_core::exact::{BigRat, QLaurent};
use schmidt_core::families::{FamilyId, FamilySpec};
use schmidt_core::verify::{Counterexample, ProofReport, Statement, Status, Value};

#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error("malformed number `{0}`")]
    Number(String),
    #[error("unknown {what} `{value}`")]
    Tag { what: &'static str, value: String },
    #[error(transparent)]
    Core(#[from] schmidt_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, WireError>;

pub fn int_to_wire(v: &BigInt) -> String {
    v.to_string()
}

pub fn int_from_wire(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| WireError::Number(s.to_string()))
}

pub fn rat_to_wire(v: &BigRat) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn rat_from_wire(s: &str) -> Result<BigRat> {
    match s.split_once('/') {
        None => Ok(BigRat::from_integer(int_from_wire(s)?)),
        Some((p, q)) => {
            let q = int_from_wire(q)?;
            if q == BigInt::from(0) {
                return Err(WireError::Number(s.to_string()));
            }
            Ok(BigRat::new(int_from_wire(p)?, q))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireLaurent {
    pub offset: i64,
    pub coeffs: Vec<String>,
}

impl From<&QLaurent> for WireLaurent {
    fn from(p: &QLaurent) -> Self {
        Self {
            offset: p.offset(),
            coeffs: p.coeffs().iter().map(int_to_wire).collect(),
        }
    }
}

impl WireLaurent {
    pub fn to_core(&self) -> Result<QLaurent> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| int_from_wire(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(QLaurent::from_coeffs(self.offset, coeffs))
    }
}

/// A table entry or identity side: a rational string or a Laurent object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireValue {
    Number(String),
    Laurent(WireLaurent),
}

impl From<&Value> for WireValue {
    fn from(v: &Value) -> Self {
        match v {
            Value::Rat(r) => WireValue::Number(rat_to_wire(r)),
            Value::Laurent(p) => WireValue::Laurent(p.into()),
        }
    }
}

impl WireValue {
    pub fn to_core(&self) -> Result<Value> {
        Ok(match self {
            WireValue::Number(s) => Value::Rat(rat_from_wire(s)?),
            WireValue::Laurent(p) => Value::Laurent(p.to_core()?),
        })
    }
}

fn family_from_wire(s: &str) -> Result<FamilyId> {
    Ok(FamilySpec::parse(s)?.id)
}

fn provenance_from_wire(s: &str) -> Result<Provenance> {
    [Provenance::Recursive, Provenance::DirectOracle]
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| WireError::Tag {
            what: "provenance",
            value: s.to_string(),
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireTable {
    pub family: String,
    pub k: usize,
    pub r: usize,
    pub provenance: String,
    pub entries: BTreeMap<usize, WireValue>,
}

fn table_to_wire<V>(t: &CoeffTable<V>, enc: impl Fn(&V) -> WireValue) -> WireTable {
    WireTable {
        family: t.family.to_string(),
        k: t.k,
        r: t.r,
        provenance: t.provenance.as_str().to_string(),
        entries: t.entries.iter().map(|(j, v)| (*j, enc(v))).collect(),
    }
}

impl From<&ClassicalTable> for WireTable {
    fn from(t: &ClassicalTable) -> Self {
        table_to_wire(t, |v| WireValue::Number(rat_to_wire(v)))
    }
}

impl From<&QTable> for WireTable {
    fn from(t: &QTable) -> Self {
        table_to_wire(t, |v| WireValue::Laurent(v.into()))
    }
}

impl WireTable {
    fn to_core_with<V>(&self, dec: impl Fn(&WireValue) -> Result<V>) -> Result<CoeffTable<V>> {
        Ok(CoeffTable {
            family: family_from_wire(&self.family)?,
            k: self.k,
            r: self.r,
            provenance: provenance_from_wire(&self.provenance)?,
            entries: self
                .entries
                .iter()
                .map(|(j, v)| Ok((*j, dec(v)?)))
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_classical(&self) -> Result<ClassicalTable> {
        self.to_core_with(|v| match v {
            WireValue::Number(s) => rat_from_wire(s),
            WireValue::Laurent(_) => Err(WireError::Tag {
                what: "classical entry",
                value: "q-polynomial".into(),
            }),
        })
    }

    pub fn to_q(&self) -> Result<QTable> {
        self.to_core_with(|v| match v {
            WireValue::Laurent(p) => p.to_core(),
            WireValue::Number(s) => Err(WireError::Tag {
                what: "q entry",
                value: s.clone(),
            }),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireCounterexample {
    pub at: BTreeMap<String, i64>,
    pub lhs: WireValue,
    pub rhs: WireValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireReport {
    pub family: String,
    pub statement: String,
    pub params: BTreeMap<String, i64>,
    pub status: String,
    pub degree_bound: usize,
    pub points_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<WireCounterexample>,
}

impl From<&ProofReport> for WireReport {
    fn from(r: &ProofReport) -> Self {
        Self {
            family: r.family.to_string(),
            statement: r.statement.as_str().to_string(),
            params: r.params.clone(),
            status: r.status.as_str().to_string(),
            degree_bound: r.degree_bound,
            points_checked: r.points_checked,
            counterexample: r.counterexample.as_ref().map(|c| WireCounterexample {
                at: c.at.clone(),
                lhs: (&c.lhs).into(),
                rhs: (&c.rhs).into(),
            }),
        }
    }
}

impl WireReport {
    pub fn to_core(&self) -> Result<ProofReport> {
        let statement = [
            Statement::ProductIdentity,
            Statement::ExponentLaw,
            Statement::Expansion,
        ]
        .into_iter()
        .find(|s| s.as_str() == self.statement)
        .ok_or_else(|| WireError::Tag {
            what: "statement",
            value: self.statement.clone(),
        })?;
        let status = [Status::Proved, Status::Falsified, Status::CheckedOnly]
            .into_iter()
            .find(|s| s.as_str() == self.status)
            .ok_or_else(|| WireError::Tag {
                what: "status",
                value: self.status.clone(),
            })?;
        let counterexample = match &self.counterexample {
            None => None,
            Some(c) => Some(Counterexample {
                at: c.at.clone(),
                lhs: c.lhs.to_core()?,
                rhs: c.rhs.to_core()?,
            }),
        };
        Ok(ProofReport {
            family: family_from_wire(&self.family)?,
            statement,
            params: self.params.clone(),
            status,
            degree_bound: self.degree_bound,
            points_checked: self.points_checked,
            counterexample,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireSchmidt {
    pub r: usize,
    pub values: Vec<String>,
    pub integral: bool,
}

impl From<&SchmidtRow> for WireSchmidt {
    fn from(row: &SchmidtRow) -> Self {
        Self {
            r: row.r,
            values: row.values.iter().map(rat_to_wire).collect(),
            integral: row.all_integral(),
        }
    }
}

impl WireSchmidt {
    pub fn to_core(&self) -> Result<SchmidtRow> {
        Ok(SchmidtRow {
            r: self.r,
            values: self
                .values
                .iter()
                .map(|v| rat_from_wire(v))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireCell {
    pub family: String,
    pub k: usize,
    pub i: usize,
    pub support: Option<[usize; 2]>,
    pub values: BTreeMap<usize, String>,
    pub integral: bool,
    pub consistency_margin: usize,
}

impl From<&DiscoveredS> for WireCell {
    fn from(c: &DiscoveredS) -> Self {
        Self {
            family: c.tag.clone(),
            k: c.k,
            i: c.i,
            support: c.support().map(|s| [*s.start(), *s.end()]),
            values: c.values.iter().map(|(j, v)| (*j, rat_to_wire(v))).collect(),
            integral: c.integral(),
            consistency_margin: c.consistency_margin,
        }
    }
}

impl WireCell {
    pub fn to_core(&self) -> Result<DiscoveredS> {
        Ok(DiscoveredS {
            tag: self.family.clone(),
            k: self.k,
            i: self.i,
            values: self
                .values
                .iter()
                .map(|(j, v)| Ok((*j, rat_from_wire(v)?)))
                .collect::<Result<_>>()?,
            consistency_margin: self.consistency_margin,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRecurrence {
    pub order: usize,
    pub coeff_degree: usize,
    /// `coefficients[l][e]`: coefficient of `m^e` in the polynomial multiplying `t(m+l)`.
    pub coefficients: Vec<Vec<String>>,
    pub fit_window: [usize; 2],
    pub verify_window: [usize; 2],
    pub text: String,
}

impl From<&RecurrenceCandidate> for WireRecurrence {
    fn from(c: &RecurrenceCandidate) -> Self {
        Self {
            order: c.order,
            coeff_degree: c.coeff_degree,
            coefficients: c
                .coefficients
                .iter()
                .map(|p| p.iter().map(int_to_wire).collect())
                .collect(),
            fit_window: [*c.fit_window.start(), *c.fit_window.end()],
            verify_window: [*c.verify_window.start(), *c.verify_window.end()],
            text: c.to_string(),
        }
    }
}

impl WireRecurrence {
    pub fn to_core(&self) -> Result<RecurrenceCandidate> {
        Ok(RecurrenceCandidate {
            order: self.order,
            coeff_degree: self.coeff_degree,
            coefficients: self
                .coefficients
                .iter()
                .map(|p| p.iter().map(|c| int_from_wire(c)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
            fit_window: self.fit_window[0]..=self.fit_window[1],
            verify_window: self.verify_window[0]..=self.verify_window[1],
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("wire types always serialize");
    out.push(b'\n');
    out
}
