//! Naturals that are either exact or kept as an expression tree.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// An exact natural, or an unevaluated expression over constants, sums,
/// powers and the `U` / `Hind` oracles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Exact(BigUint),
    Sum(Vec<ExtNat>),
    /// `2^x`
    Pow2(Box<ExtNat>),
    /// `base^exp`
    Pow(Box<ExtNat>, Box<ExtNat>),
    U(Box<ExtNat>, Box<ExtNat>),
    Hind(Box<ExtNat>, Box<ExtNat>),
    /// A named quantity that could not be expressed, e.g. `n_{k*}` when
    /// the number of recursion steps is itself unknown.
    Symbol(String),
}

/// Default ceiling on the bit length of materialized values.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

impl ExtNat {
    pub fn from_u64(x: u64) -> Self {
        ExtNat::Exact(BigUint::from(x))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExtNat::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            ExtNat::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.as_exact().and_then(ToPrimitive::to_u64)
    }

    /// Sum with exact terms folded into one constant.
    pub fn sum(terms: Vec<ExtNat>) -> ExtNat {
        let mut constant = BigUint::zero();
        let mut rest = Vec::new();
        for t in terms {
            match t {
                ExtNat::Exact(v) => constant += v,
                ExtNat::Sum(inner) => {
                    for x in inner {
                        match x {
                            ExtNat::Exact(v) => constant += v,
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if rest.is_empty() {
            return ExtNat::Exact(constant);
        }
        if !constant.is_zero() {
            rest.insert(0, ExtNat::Exact(constant));
        }
        if rest.len() == 1 {
            return rest.pop().unwrap();
        }
        ExtNat::Sum(rest)
    }

    /// `2^x`, materialized when `x <= bit_budget`.
    pub fn pow2(x: ExtNat, bit_budget: u64) -> ExtNat {
        match x.to_u64() {
            Some(e) if e <= bit_budget => ExtNat::Exact(BigUint::one() << e),
            _ => ExtNat::Pow2(Box::new(x)),
        }
    }

    /// `base^exp`; `1^x = 1`, `x^0 = 1`, materialized when the result fits
    /// in `bit_budget` bits.
    pub fn pow(base: ExtNat, exp: ExtNat, bit_budget: u64) -> ExtNat {
        if let Some(b) = base.as_exact() {
            if b.is_one() {
                return ExtNat::from_u64(1);
            }
            if b.is_zero() {
                if let Some(e) = exp.as_exact() {
                    return ExtNat::from_u64(u64::from(e.is_zero()));
                }
            }
        }
        if let Some(e) = exp.as_exact() {
            if e.is_zero() {
                return ExtNat::from_u64(1);
            }
            if let (Some(b), Some(e64)) = (base.as_exact(), e.to_u64()) {
                // bits(b^e) <= e * bits(b)
                if b.bits().checked_mul(e64).is_some_and(|bits| bits <= bit_budget) {
                    return ExtNat::Exact(b.pow(e64 as u32));
                }
                if b == &BigUint::from(2u32) {
                    return ExtNat::pow2(exp, bit_budget);
                }
            }
        }
        ExtNat::Pow(Box::new(base), Box::new(exp))
    }

    /// Number of oracle leaves (`U`/`Hind` nodes) in the tree.
    pub fn oracle_leaves(&self) -> usize {
        match self {
            ExtNat::Exact(_) | ExtNat::Symbol(_) => 0,
            ExtNat::Sum(v) => v.iter().map(ExtNat::oracle_leaves).sum(),
            ExtNat::Pow2(x) => x.oracle_leaves(),
            ExtNat::Pow(a, b) => a.oracle_leaves() + b.oracle_leaves(),
            ExtNat::U(a, b) | ExtNat::Hind(a, b) => 1 + a.oracle_leaves() + b.oracle_leaves(),
        }
    }
}

/// Prefix notation; exact values in decimal.
impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Exact(v) => write!(f, "{v}"),
            ExtNat::Sum(terms) => {
                write!(f, "(+")?;
                for t in terms {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            ExtNat::Pow2(x) => write!(f, "(pow2 {x})"),
            ExtNat::Pow(b, e) => write!(f, "(pow {b} {e})"),
            ExtNat::U(n, c) => write!(f, "(U {n} {c})"),
            ExtNat::Hind(n, c) => write!(f, "(Hind {n} {c})"),
            ExtNat::Symbol(s) => write!(f, "{s}"),
        }
    }
}

/// Largest integer written as a JSON number; larger ones become strings.
const JSON_SAFE: u64 = (1 << 53) - 1;

/// Exact values up to 2^53 - 1 as JSON numbers, everything else as a
/// string (decimal digits or prefix expression).
impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_u64() {
            Some(v) if v <= JSON_SAFE => s.serialize_u64(v),
            _ => s.serialize_str(&self.to_string()),
        }
    }
}
