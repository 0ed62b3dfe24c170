//! The recursive upper bound on `Sp(m,p,c)`.
//!
//! With `k* = Hind(p+1,c)` and `n_0` least such that `m <= 2^{n_0}`:
//!
//! ```text
//! m_i     = 2^{n_0 + ... + n_i}
//! alpha_i = 2^{k* - i - 1 + n_1 + ... + n_i}
//! n_{i+1} = U(m_i, c^{alpha_i})
//! ```
//!
//! Two bounds are reported: `bound_paper = 2^{n_{k*}}` and
//! `bound_operative = m_{k*}`, the length of the interval on which the
//! extraction's coloring of subsets of `S_0 ∪ ... ∪ S_{k*-1}` is defined.

mod extnat;
mod oracle;

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};

pub use extnat::{ExtNat, DEFAULT_BIT_BUDGET};
pub use oracle::{closed_form, Fallback, OracleKind, OracleTable};

/// Traces with more recursion steps than this are truncated.
pub const MAX_TRACE_STEPS: u64 = 1 << 16;

/// Least `n` with `m <= 2^n`.
pub fn least_n0(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("least_n0 needs m >= 1".into()));
    }
    Ok(u64::from(64 - (m - 1).leading_zeros()))
}

/// Full transcript of the recursion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundTrace {
    pub m: u64,
    pub p: u64,
    pub c: u64,
    pub k_star: ExtNat,
    /// `n_0, ..., n_{k*}`
    pub n_seq: Vec<ExtNat>,
    /// `m_0, ..., m_{k*}`
    pub m_seq: Vec<ExtNat>,
    /// `alpha_0, ..., alpha_{k*-1}`
    pub alpha_seq: Vec<ExtNat>,
    pub bound_paper: ExtNat,
    pub bound_operative: ExtNat,
}

impl BoundTrace {
    /// True when every entry is an exact natural.
    pub fn is_exact(&self) -> bool {
        self.k_star.is_exact()
            && self.n_seq.iter().chain(&self.m_seq).chain(&self.alpha_seq).all(ExtNat::is_exact)
            && self.bound_paper.is_exact()
            && self.bound_operative.is_exact()
    }

    /// Evaluates every entry against `oracles`.
    pub fn eval(&self, oracles: &OracleTable, bit_budget: u64) -> BoundTrace {
        let ev = |x: &ExtNat| eval(x, oracles, bit_budget);
        BoundTrace {
            k_star: ev(&self.k_star),
            n_seq: self.n_seq.iter().map(ev).collect(),
            m_seq: self.m_seq.iter().map(ev).collect(),
            alpha_seq: self.alpha_seq.iter().map(ev).collect(),
            bound_paper: ev(&self.bound_paper),
            bound_operative: ev(&self.bound_operative),
            ..*self
        }
    }
}

/// A recursion step whose oracle search ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMiss {
    pub message: String,
    /// Everything computed before the miss.
    pub partial: BoundTrace,
}

impl From<OracleMiss> for Error {
    fn from(e: OracleMiss) -> Self {
        Error::UnknownOracle(e.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundError {
    Domain(Error),
    UnknownOracle(Box<OracleMiss>),
}

impl From<BoundError> for Error {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Domain(e) => e,
            BoundError::UnknownOracle(miss) => (*miss).into(),
        }
    }
}

/// Resolves an oracle leaf whose arguments are exact; anything else stays
/// a leaf.
fn oracle_leaf(kind: OracleKind, n: ExtNat, c: ExtNat, oracles: &OracleTable) -> Result<ExtNat> {
    if let (Some(nv), Some(cv)) = (n.as_exact(), c.as_exact()) {
        if let Some(v) = oracles.resolve(kind, nv, cv)? {
            return Ok(ExtNat::Exact(v));
        }
    }
    Ok(match kind {
        OracleKind::U => ExtNat::U(Box::new(n), Box::new(c)),
        OracleKind::Hind => ExtNat::Hind(Box::new(n), Box::new(c)),
    })
}

/// Runs the recursion for `(m,p,c)`.
///
/// `k*` is taken from the table, then from the closed forms, then from the
/// fallback. If it stays symbolic the sequences cannot be laid out and the
/// trace ends with the symbols `n_{k*}` and `m_{k*}`.
pub fn spencer_bound(
    m: u64,
    p: u64,
    c: u64,
    oracles: &OracleTable,
    bit_budget: u64,
) -> Result<BoundTrace, BoundError> {
    if m == 0 || p == 0 || c == 0 {
        return Err(BoundError::Domain(Error::Domain("m, p, c must be positive".into())));
    }
    let n0 = ExtNat::from_u64(least_n0(m).map_err(BoundError::Domain)?);
    let mut trace = BoundTrace {
        m,
        p,
        c,
        k_star: ExtNat::Hind(Box::new(ExtNat::from_u64(p + 1)), Box::new(ExtNat::from_u64(c))),
        n_seq: vec![n0.clone()],
        m_seq: vec![ExtNat::pow2(n0, bit_budget)],
        alpha_seq: Vec::new(),
        bound_paper: ExtNat::Pow2(Box::new(ExtNat::Symbol("n_{k*}".into()))),
        bound_operative: ExtNat::Symbol("m_{k*}".into()),
    };
    let miss = |message: String, partial: &BoundTrace| {
        BoundError::UnknownOracle(Box::new(OracleMiss { message, partial: partial.clone() }))
    };

    let (hn, hc) = (BigUint::from(p + 1), BigUint::from(c));
    let k_star = match oracles.lookup(OracleKind::Hind, &hn, &hc).or_else(|| closed_form(&hn, &hc)) {
        Some(v) => Some(v),
        None => oracles.resolve(OracleKind::Hind, &hn, &hc).map_err(|e| miss(e.to_string(), &trace))?,
    };
    let Some(k) = k_star.as_ref().and_then(ToPrimitive::to_u64).filter(|&k| k <= MAX_TRACE_STEPS) else {
        if let Some(v) = k_star {
            trace.k_star = ExtNat::Exact(v);
        }
        return Ok(trace);
    };
    trace.k_star = ExtNat::from_u64(k);

    let c_nat = ExtNat::from_u64(c);
    for i in 0..k {
        let i = i as usize;
        // sum_{j=1}^{i} n_j
        let tail = ExtNat::sum(trace.n_seq[1..=i].to_vec());
        let alpha = ExtNat::pow2(ExtNat::sum(vec![ExtNat::from_u64(k - i as u64 - 1), tail]), bit_budget);
        let colors = ExtNat::pow(c_nat.clone(), alpha.clone(), bit_budget);
        trace.alpha_seq.push(alpha);
        let next = oracle_leaf(OracleKind::U, trace.m_seq[i].clone(), colors, oracles)
            .map_err(|e| miss(e.to_string(), &trace))?;
        trace.n_seq.push(next);
        let m_next = ExtNat::pow2(ExtNat::sum(trace.n_seq.clone()), bit_budget);
        trace.m_seq.push(m_next);
    }
    let last = trace.n_seq.last().expect("n_0 present").clone();
    trace.bound_paper = ExtNat::pow2(last, bit_budget);
    trace.bound_operative = trace.m_seq.last().expect("m_0 present").clone();
    Ok(trace)
}

/// Evaluates `x` as far as `oracles` and `bit_budget` allow. Never fails:
/// leaves that cannot be resolved are kept.
pub fn eval(x: &ExtNat, oracles: &OracleTable, bit_budget: u64) -> ExtNat {
    let ev = |y: &ExtNat| eval(y, oracles, bit_budget);
    match x {
        ExtNat::Exact(_) | ExtNat::Symbol(_) => x.clone(),
        ExtNat::Sum(terms) => ExtNat::sum(terms.iter().map(ev).collect()),
        ExtNat::Pow2(e) => ExtNat::pow2(ev(e), bit_budget),
        ExtNat::Pow(b, e) => ExtNat::pow(ev(b), ev(e), bit_budget),
        ExtNat::U(n, c) => oracle_leaf(OracleKind::U, ev(n), ev(c), oracles)
            .unwrap_or_else(|_| ExtNat::U(Box::new(ev(n)), Box::new(ev(c)))),
        ExtNat::Hind(n, c) => oracle_leaf(OracleKind::Hind, ev(n), ev(c), oracles)
            .unwrap_or_else(|_| ExtNat::Hind(Box::new(ev(n)), Box::new(ev(c)))),
    }
}

/// One `key=value` line per entry, in a fixed order.
pub fn render(trace: &BoundTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m={}", trace.m);
    let _ = writeln!(out, "p={}", trace.p);
    let _ = writeln!(out, "c={}", trace.c);
    let _ = writeln!(out, "k*={}", trace.k_star);
    for (i, x) in trace.n_seq.iter().enumerate() {
        let _ = writeln!(out, "n_{i}={x}");
    }
    for (i, x) in trace.m_seq.iter().enumerate() {
        let _ = writeln!(out, "m_{i}={x}");
    }
    for (i, x) in trace.alpha_seq.iter().enumerate() {
        let _ = writeln!(out, "alpha_{i}={x}");
    }
    let _ = writeln!(out, "bound_paper={}", trace.bound_paper);
    let _ = writeln!(out, "bound_operative={}", trace.bound_operative);
    out
}
