//! Sources for `U(n,c)` and `Hind(n,c)` values.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::search::{compute_hind, compute_u, SearchBudget, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    U,
    Hind,
}

/// What to do when a value is not in the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    /// Leave the leaf unevaluated.
    Symbolic,
    /// Use the closed forms `X(1,c) = 1`, `X(n,1) = n`, then run the
    /// coloring search with this budget.
    ExactSearch(SearchBudget),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTable {
    pub u_entries: BTreeMap<(BigUint, BigUint), BigUint>,
    pub hind_entries: BTreeMap<(BigUint, BigUint), BigUint>,
    pub fallback: Fallback,
}

impl OracleTable {
    pub fn symbolic() -> Self {
        OracleTable { u_entries: BTreeMap::new(), hind_entries: BTreeMap::new(), fallback: Fallback::Symbolic }
    }

    pub fn exact(budget: SearchBudget) -> Self {
        OracleTable { fallback: Fallback::ExactSearch(budget), ..OracleTable::symbolic() }
    }

    pub fn insert(&mut self, kind: OracleKind, n: u64, c: u64, value: u64) -> Result<()> {
        if n == 0 || c == 0 || value == 0 {
            return Err(Error::Input(format!("oracle entry ({n},{c}) -> {value} must be positive")));
        }
        self.entries_mut(kind).insert((n.into(), c.into()), value.into());
        Ok(())
    }

    fn entries(&self, kind: OracleKind) -> &BTreeMap<(BigUint, BigUint), BigUint> {
        match kind {
            OracleKind::U => &self.u_entries,
            OracleKind::Hind => &self.hind_entries,
        }
    }

    fn entries_mut(&mut self, kind: OracleKind) -> &mut BTreeMap<(BigUint, BigUint), BigUint> {
        match kind {
            OracleKind::U => &mut self.u_entries,
            OracleKind::Hind => &mut self.hind_entries,
        }
    }

    /// Parses `{"u":[[n,c,value],...],"hind":[[n,c,value],...]}`; numbers
    /// may be JSON integers or decimal strings.
    pub fn from_json(text: &str, fallback: Fallback) -> Result<Self> {
        let root: Value =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed oracle table: {e}")))?;
        let obj = root
            .as_object()
            .ok_or_else(|| Error::Input("oracle table must be a JSON object".into()))?;
        let mut table = OracleTable { fallback, ..OracleTable::symbolic() };
        for (key, value) in obj {
            let kind = match key.as_str() {
                "u" => OracleKind::U,
                "hind" => OracleKind::Hind,
                other => return Err(Error::Input(format!("unknown oracle table key {other:?}"))),
            };
            let rows = value
                .as_array()
                .ok_or_else(|| Error::Input(format!("oracle table entry {key:?} must be an array")))?;
            for row in rows {
                let cols = row.as_array().filter(|r| r.len() == 3).ok_or_else(|| {
                    Error::Input(format!("oracle table rows must be [n,c,value], got {row}"))
                })?;
                let n = parse_big(&cols[0])?;
                let c = parse_big(&cols[1])?;
                let v = parse_big(&cols[2])?;
                if [&n, &c, &v].iter().any(|x| x.bits() == 0) {
                    return Err(Error::Input(format!("oracle table row {row} has a zero entry")));
                }
                table.entries_mut(kind).insert((n, c), v);
            }
        }
        Ok(table)
    }

    /// Table lookup only.
    pub fn lookup(&self, kind: OracleKind, n: &BigUint, c: &BigUint) -> Option<BigUint> {
        self.entries(kind).get(&(n.clone(), c.clone())).cloned()
    }

    /// Table, then the fallback. `Ok(None)` leaves the leaf symbolic;
    /// `Err` reports an exact search that ran out of budget.
    pub fn resolve(&self, kind: OracleKind, n: &BigUint, c: &BigUint) -> Result<Option<BigUint>> {
        if let Some(v) = self.lookup(kind, n, c) {
            return Ok(Some(v));
        }
        match self.fallback {
            Fallback::Symbolic => Ok(None),
            Fallback::ExactSearch(budget) => {
                if let Some(v) = closed_form(n, c) {
                    return Ok(Some(v));
                }
                let name = match kind {
                    OracleKind::U => "U",
                    OracleKind::Hind => "Hind",
                };
                let (Some(n32), Some(c32)) = (n.to_u32(), c.to_u32()) else {
                    return Err(Error::UnknownOracle(format!(
                        "{name}({n},{c}) is beyond exact search"
                    )));
                };
                let outcome = match kind {
                    OracleKind::U => compute_u(n32, c32, budget)?,
                    OracleKind::Hind => compute_hind(n32, c32, budget)?,
                };
                match outcome.status {
                    Status::Exact => Ok(Some(outcome.value.into())),
                    Status::Unknown => Err(Error::UnknownOracle(format!(
                        "{name}({n},{c}) search gave {outcome}"
                    ))),
                }
            }
        }
    }
}

/// `X(1,c) = 1` and `X(n,1) = n` for both `U` and `Hind`: a single block is
/// one monochromatic cell, and under one color any `n` blocks work while
/// fewer than `n` blocks cannot carry `n` disjoint non-empty unions.
pub fn closed_form(n: &BigUint, c: &BigUint) -> Option<BigUint> {
    if n.is_one() {
        Some(BigUint::one())
    } else if c.is_one() {
        Some(n.clone())
    } else {
        None
    }
}

fn parse_big(v: &Value) -> Result<BigUint> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::Input(format!("oracle value {n} is not a natural number"))),
        Value::String(s) => s
            .parse::<BigUint>()
            .map_err(|_| Error::Input(format!("oracle value {s:?} is not a decimal natural"))),
        other => Err(Error::Input(format!("oracle value {other} must be a number or string"))),
    }
}
