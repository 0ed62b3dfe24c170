//! Exact small values of `Sp(m,p,c)`, `U(n,c)` and `Hind(n,c)`.
//!
//! Each number is the least `k` at which every coloring admits a witness.
//! The search walks `k = 1, 2, ...`, looking for a bad coloring at each
//! level; the first level without one is the answer, and the bad coloring
//! found one level below is kept as a lower-bound certificate.
//!
//! `U` and `Hind` are computed over the singleton blocks `{0},...,{k-1}`.
//! Any other family of `k` non-empty disjoint blocks is isomorphic to it as
//! a union-semilattice (order-preserving when the family is `<`-ordered).

mod bits;
mod engine;
pub mod naive;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coloring, DomainKind};

use engine::{deepest_bad, Closure, Stop};
pub use witness::{find_spencer_witness, find_union_witness, MAX_INTERVAL_CELLS, MAX_UNION_BLOCKS};
use witness::{SpencerClosure, UnionClosure};

/// Largest `k` the coloring search handles for `U` and `Hind` (255 cells).
pub const MAX_SEARCH_BLOCKS: u32 = 8;

/// Which number is being computed; `c` is carried separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Problem {
    Sp { m: u64, p: u64 },
    U { n: u32 },
    Hind { n: u32 },
}

impl Problem {
    pub fn domain(&self) -> DomainKind {
        match self {
            Problem::Sp { .. } => DomainKind::Interval,
            Problem::U { .. } | Problem::Hind { .. } => DomainKind::Subsets,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Problem::Sp { m, p } => m >= 1 && p >= 1,
            Problem::U { n } | Problem::Hind { n } => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("parameters of {self:?} must be positive")))
        }
    }

    /// Largest `k` supported by the search engine for this problem.
    fn engine_limit(&self) -> u32 {
        match self {
            Problem::Sp { .. } => MAX_INTERVAL_CELLS,
            _ => MAX_SEARCH_BLOCKS,
        }
    }

    /// Whether `coloring` admits a witness for this problem.
    pub fn has_witness(&self, coloring: &Coloring) -> Result<bool> {
        Ok(match *self {
            Problem::Sp { m, p } => find_spencer_witness(coloring, m, p)?.is_some(),
            Problem::U { n } => find_union_witness(coloring, n, false)?.is_some(),
            Problem::Hind { n } => find_union_witness(coloring, n, true)?.is_some(),
        })
    }
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Problem::Sp { m, p } => write!(f, "sp({m},{p})"),
            Problem::U { n } => write!(f, "u({n})"),
            Problem::Hind { n } => write!(f, "hind({n})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_k: u32,
    pub max_nodes: u64,
    pub threads: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_k: 64, max_nodes: 50_000_000, threads: 1 }
    }
}

impl SearchBudget {
    fn validate(&self) -> Result<()> {
        if self.max_k == 0 || self.max_nodes == 0 || self.threads == 0 {
            return Err(Error::Input("budget fields must all be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Unknown,
}

/// A coloring admitting no witness for `problem`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadColoringCertificate {
    pub problem: Problem,
    pub coloring: Coloring,
}

/// Result of a threshold computation.
///
/// `Exact`: `value` is the number and `lower_certificate` (absent only when
/// `value == 1`) is bad at `value - 1`. `Unknown`: `value` is a proven
/// lower bound and the certificate, if any, is bad at `value - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: Status,
    pub value: u64,
    pub lower_certificate: Option<BadColoringCertificate>,
    pub nodes_explored: u64,
}

impl std::fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.status {
            Status::Exact => write!(f, "exact {}", self.value),
            Status::Unknown => write!(f, "unknown >= {}", self.value),
        }
    }
}

/// `Sp(m,p,c)`.
pub fn compute_sp(m: u64, p: u64, c: u32, budget: SearchBudget) -> Result<SearchOutcome> {
    compute(Problem::Sp { m, p }, c, budget)
}

/// `U(n,c)`.
pub fn compute_u(n: u32, c: u32, budget: SearchBudget) -> Result<SearchOutcome> {
    compute(Problem::U { n }, c, budget)
}

/// `Hind(n,c)`.
pub fn compute_hind(n: u32, c: u32, budget: SearchBudget) -> Result<SearchOutcome> {
    compute(Problem::Hind { n }, c, budget)
}

/// Pruned, canonicalized threshold search.
pub fn compute(problem: Problem, c: u32, budget: SearchBudget) -> Result<SearchOutcome> {
    problem.validate()?;
    budget.validate()?;
    if c == 0 {
        return Err(Error::Domain("c must be positive".into()));
    }
    let kind = problem.domain();
    let max_k = budget.max_k.min(problem.engine_limit());
    let max_cells = Coloring::cell_count(kind, max_k)? as usize;
    // A canonical coloring of `max_cells` cells never uses more colors than cells.
    let colors = c.min(max_cells as u32).min(u8::MAX as u32) as u8;
    let closure = match problem {
        Problem::Sp { m, p } => Closure::Spencer(SpencerClosure::new(m, p)),
        Problem::U { n } => Closure::Union(UnionClosure::new(n, false, max_cells)),
        Problem::Hind { n } => Closure::Union(UnionClosure::new(n, true, max_cells)),
    };
    let deep = deepest_bad(&closure, max_cells, colors, budget.max_nodes, budget.threads);

    // Largest level whose whole domain is covered by a bad prefix.
    let mut bad_k = 0u32;
    while bad_k < max_k && Coloring::cell_count(kind, bad_k + 1)? as usize <= deep.depth() {
        bad_k += 1;
    }
    let certificate = if bad_k == 0 {
        None
    } else {
        let cells = Coloring::cell_count(kind, bad_k)? as usize;
        let assign = deep.first_bad[cells].iter().map(|&x| u32::from(x)).collect();
        Some(Coloring::new(kind, bad_k, c, assign)?)
    };
    let status = match deep.stop {
        Stop::Exhausted => Status::Exact,
        Stop::ReachedTarget | Stop::OutOfBudget => Status::Unknown,
    };
    Ok(outcome(status, bad_k as u64 + 1, problem, certificate, deep.nodes))
}

fn outcome(status: Status, value: u64, problem: Problem, bad: Option<Coloring>, nodes: u64) -> SearchOutcome {
    SearchOutcome {
        status,
        value,
        lower_certificate: bad.map(|coloring| BadColoringCertificate { problem, coloring }),
        nodes_explored: nodes,
    }
}

/// True iff the certificate's coloring admits no witness.
pub fn verify_certificate(cert: &BadColoringCertificate) -> Result<bool> {
    cert.problem.validate()?;
    if cert.coloring.kind() != cert.problem.domain() {
        return Err(Error::Input(format!(
            "certificate for {} carries a coloring of the wrong kind",
            cert.problem
        )));
    }
    Ok(!cert.problem.has_witness(&cert.coloring)?)
}
