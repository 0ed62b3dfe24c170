//! Finite sets, block families, colorings and witnesses.
//!
//! `FiniteSet` is the common currency: blocks, unions, intervals and the
//! binary-digit preimages of integers under `exp2` are all finite sets of
//! naturals (0 included).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite subset of the naturals, stored as a strictly increasing list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FiniteSet(Vec<u32>);

impl FiniteSet {
    pub fn empty() -> Self {
        FiniteSet(Vec::new())
    }

    /// Builds a set from arbitrary elements; duplicates are merged.
    pub fn new<I: IntoIterator<Item = u32>>(elements: I) -> Self {
        let mut v: Vec<u32> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet(v)
    }

    /// Builds a set from an already strictly increasing list.
    pub fn from_sorted(elements: Vec<u32>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input(format!(
                "set elements must be strictly increasing: {elements:?}"
            )));
        }
        Ok(FiniteSet(elements))
    }

    /// The closed interval `[lo, hi]`; empty when `hi < lo`.
    pub fn interval(lo: u32, hi: u32) -> Self {
        if hi < lo {
            return FiniteSet::empty();
        }
        FiniteSet((lo..=hi).collect())
    }

    /// Decodes a machine-word bitmask (bit b set means b is a member).
    pub fn from_mask(mask: u64) -> Self {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        let mut rest = mask;
        while rest != 0 {
            v.push(rest.trailing_zeros());
            rest &= rest - 1;
        }
        FiniteSet(v)
    }

    /// Bitmask encoding; `None` when an element does not fit in 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &e| (e < 64).then(|| acc | (1u64 << e)))
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_disjoint(&self, other: &FiniteSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let next = match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            v.push(next);
        }
        FiniteSet(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }
}

impl TryFrom<Vec<u32>> for FiniteSet {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        FiniteSet::from_sorted(v)
    }
}

impl From<FiniteSet> for Vec<u32> {
    fn from(s: FiniteSet) -> Self {
        s.0
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// `2^a0 + ... + 2^an` for a non-empty set.
pub fn exp2(set: &FiniteSet) -> Result<u64> {
    if set.is_empty() {
        return Err(Error::Domain("exp2 of the empty set".into()));
    }
    set.to_mask()
        .ok_or_else(|| Error::Domain(format!("exp2 of {set} overflows 64 bits")))
}

/// Inverse of [`exp2`]: the positions of the binary digits of `n`.
pub fn set_of(n: u64) -> Result<FiniteSet> {
    if n == 0 {
        return Err(Error::Domain("set_of(0): zero has no binary support".into()));
    }
    Ok(FiniteSet::from_mask(n))
}

/// `A < B`, i.e. `max A < min B`.
pub fn precedes(a: &FiniteSet, b: &FiniteSet) -> Result<bool> {
    match (a.max(), b.min()) {
        (Some(x), Some(y)) => Ok(x < y),
        _ => Err(Error::Domain("precedes on an empty set".into())),
    }
}

/// A family of pairwise disjoint non-empty blocks, optionally `<`-ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFamily {
    blocks: Vec<FiniteSet>,
    ordered: bool,
}

impl BlockFamily {
    pub fn new(blocks: Vec<FiniteSet>, ordered: bool) -> Result<Self> {
        if blocks.iter().any(FiniteSet::is_empty) {
            return Err(Error::Input("block family contains an empty block".into()));
        }
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !blocks[i].is_disjoint(&blocks[j]) {
                    return Err(Error::Input(format!(
                        "blocks {i} and {j} are not disjoint"
                    )));
                }
            }
        }
        if ordered {
            for (i, w) in blocks.windows(2).enumerate() {
                if !precedes(&w[0], &w[1])? {
                    return Err(Error::Input(format!(
                        "blocks {i} and {} are not in increasing order",
                        i + 1
                    )));
                }
            }
        }
        Ok(BlockFamily { blocks, ordered })
    }

    /// The canonical family `{0}, {1}, ..., {k-1}`.
    pub fn singletons(k: u32) -> Self {
        BlockFamily {
            blocks: (0..k).map(|i| FiniteSet::new([i])).collect(),
            ordered: true,
        }
    }

    pub fn blocks(&self) -> &[FiniteSet] {
        &self.blocks
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Union of the blocks selected by the index bitmask `selector`.
    pub fn union_of(&self, selector: u64) -> FiniteSet {
        let mut out = FiniteSet::empty();
        for i in FiniteSet::from_mask(selector).iter() {
            out = out.union(&self.blocks[i as usize]);
        }
        out
    }
}

/// All non-empty unions of the family, in increasing selector-bitmask order.
pub fn nu(family: &BlockFamily) -> Vec<FiniteSet> {
    assert!(family.len() < 64, "nu over more than 63 blocks");
    (1u64..(1u64 << family.len())).map(|sel| family.union_of(sel)).collect()
}

/// Sums of non-empty subsets of `h`, each element used at most once.
pub fn sum_set(h: &[u64]) -> Result<BTreeSet<u64>> {
    if h.is_empty() {
        return Err(Error::Domain("sum_set of the empty set".into()));
    }
    let distinct: BTreeSet<u64> = h.iter().copied().collect();
    if distinct.len() != h.len() {
        return Err(Error::Domain("sum_set requires distinct elements".into()));
    }
    let mut sums: BTreeSet<u64> = BTreeSet::new();
    for &x in h {
        let shifted: Vec<u64> = sums.iter().map(|s| s + x).collect();
        sums.extend(shifted);
        sums.insert(x);
    }
    Ok(sums)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// Cells are the integers `1..=k`.
    Interval,
    /// Cells are the non-empty subsets of `{0..k-1}`, addressed by bitmask `1..2^k`.
    Subsets,
}

/// A cell of a coloring's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(u64),
    Set(FiniteSet),
}

/// A total color assignment on an interval `[k]` or on `P+({0..k-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "crate::formats::ColoringFile", into = "crate::formats::ColoringFile")]
pub struct Coloring {
    kind: DomainKind,
    k: u32,
    colors: u32,
    assign: Vec<u32>,
}

/// Largest `k` accepted for subsets-kind colorings (2^k - 1 stored cells).
pub const MAX_SUBSET_BLOCKS: u32 = 30;

impl Coloring {
    pub fn new(kind: DomainKind, k: u32, colors: u32, assign: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("coloring domain parameter k must be positive".into()));
        }
        if colors == 0 {
            return Err(Error::Input("number of colors must be positive".into()));
        }
        let expected = Self::cell_count(kind, k)?;
        if assign.len() as u64 != expected {
            return Err(Error::Input(format!(
                "{} coloring with k={k} needs {expected} entries, got {}",
                kind_name(kind),
                assign.len()
            )));
        }
        if let Some((i, &c)) = assign.iter().enumerate().find(|(_, &c)| c >= colors) {
            return Err(Error::Input(format!(
                "entry {i} has color {c}, but only {colors} colors are declared"
            )));
        }
        Ok(Coloring { kind, k, colors, assign })
    }

    /// The constant coloring with color 0.
    pub fn constant(kind: DomainKind, k: u32, colors: u32) -> Result<Self> {
        let n = Self::cell_count(kind, k)?;
        Coloring::new(kind, k, colors, vec![0; n as usize])
    }

    /// Number of cells for a domain.
    pub fn cell_count(kind: DomainKind, k: u32) -> Result<u64> {
        match kind {
            DomainKind::Interval => Ok(k as u64),
            DomainKind::Subsets if k <= MAX_SUBSET_BLOCKS => Ok((1u64 << k) - 1),
            DomainKind::Subsets => Err(Error::Input(format!(
                "subsets coloring over {k} blocks is too large (max {MAX_SUBSET_BLOCKS})"
            ))),
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Colors in cell order: `assign[t-1]` colors cell `t`.
    pub fn assign(&self) -> &[u32] {
        &self.assign
    }

    /// Color of the cell with 1-based index `t` (integer `t`, or bitmask `t`).
    pub fn color_at(&self, t: u64) -> Result<u32> {
        if t == 0 || t > self.assign.len() as u64 {
            return Err(Error::Domain(format!(
                "cell {t} outside the {} domain with k={}",
                kind_name(self.kind),
                self.k
            )));
        }
        Ok(self.assign[(t - 1) as usize])
    }

    /// Restriction to `[k-1]` (interval) or `P+({0..k-2})` (subsets).
    pub fn restrict(&self, k: u32) -> Result<Coloring> {
        if k == 0 || k > self.k {
            return Err(Error::Input(format!("cannot restrict k={} to k={k}", self.k)));
        }
        let n = Self::cell_count(self.kind, k)? as usize;
        Coloring::new(self.kind, k, self.colors, self.assign[..n].to_vec())
    }

    /// Applies a color permutation `perm[old] = new`.
    pub fn renamed(&self, perm: &[u32]) -> Result<Coloring> {
        if perm.len() != self.colors as usize {
            return Err(Error::Input("color permutation has the wrong length".into()));
        }
        let assign = self.assign.iter().map(|&c| perm[c as usize]).collect();
        Coloring::new(self.kind, self.k, self.colors, assign)
    }
}

fn kind_name(kind: DomainKind) -> &'static str {
    match kind {
        DomainKind::Interval => "interval",
        DomainKind::Subsets => "subsets",
    }
}

/// Looks up the color of a cell; integers for interval colorings, sets of
/// block indices for subsets colorings.
pub fn color_of(coloring: &Coloring, cell: &Cell) -> Result<u32> {
    match (coloring.kind(), cell) {
        (DomainKind::Interval, Cell::Int(t)) => coloring.color_at(*t),
        (DomainKind::Subsets, Cell::Set(s)) => {
            if s.is_empty() {
                return Err(Error::Domain("the empty set is not a cell".into()));
            }
            let mask = s
                .to_mask()
                .ok_or_else(|| Error::Domain(format!("cell {s} outside the domain")))?;
            coloring.color_at(mask)
        }
        (DomainKind::Subsets, Cell::Int(t)) => coloring.color_at(*t),
        (DomainKind::Interval, Cell::Set(s)) => Err(Error::Domain(format!(
            "set cell {s} given to an interval coloring"
        ))),
    }
}

/// A Spencer witness `H = {a0 < ... < a_{l-1}}` together with `m`, `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpencerWitness {
    pub m: u64,
    pub p: u64,
    #[serde(rename = "H")]
    pub h: Vec<u64>,
}

impl SpencerWitness {
    pub fn l(&self) -> u64 {
        self.h.len() as u64
    }

    /// `m <= a0`, `p <= l` and `a_{p-1} <= l`, on a strictly increasing `H`.
    pub fn satisfies_size_conditions(&self) -> bool {
        let l = self.l();
        let increasing = self.h.windows(2).all(|w| w[0] < w[1]);
        increasing
            && !self.h.is_empty()
            && self.p >= 1
            && self.m <= self.h[0]
            && self.p <= l
            && self.h[(self.p - 1) as usize] <= l
    }
}

/// `n` unions of blocks (as sets of block indices) with disjoint supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionWitness {
    pub n: u32,
    pub ordered: bool,
    pub d: Vec<FiniteSet>,
}

impl UnionWitness {
    pub fn from_masks(ordered: bool, masks: &[u64]) -> Self {
        UnionWitness {
            n: masks.len() as u32,
            ordered,
            d: masks.iter().map(|&m| FiniteSet::from_mask(m)).collect(),
        }
    }

    pub fn masks(&self) -> Option<Vec<u64>> {
        self.d.iter().map(FiniteSet::to_mask).collect()
    }

    /// Non-empty, pairwise disjoint and (when ordered) `<`-increasing.
    pub fn is_well_formed(&self) -> bool {
        if self.d.len() != self.n as usize || self.d.iter().any(FiniteSet::is_empty) {
            return false;
        }
        BlockFamily::new(self.d.clone(), self.ordered).is_ok()
    }
}
