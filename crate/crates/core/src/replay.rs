//! Replay of the constructive upper-bound argument on a concrete coloring.
//!
//! Given `n_0, ..., n_{k*}` and a coloring `c` of `[m_{k*}]`, the intervals
//! `S_i = [n_0+...+n_i, n_0+...+n_{i+1}-1]` carry the coloring
//! `c*(A) = c(exp2(A))` of their non-empty subsets. Rows `w_{i,s} ⊆ S_i` are
//! chosen by reverse induction so that all non-empty unions of a level look
//! alike to every context below and above (the fingerprint coloring `c_i`).
//! An ordered union witness over the first rows gives `v_0 < ... < v_p`, and
//! the remaining rows of the levels used by `v_p` extend it to `H`.
//!
//! Subsets of `S*` are handled as 64-bit masks over their elements, so the
//! mask of `A` is `exp2(A)` itself.

use std::collections::HashMap;

use serde::Serialize;

use crate::bounds::{spencer_bound, BoundTrace, OracleTable, DEFAULT_BIT_BUDGET};
use crate::error::{Error, Result};
use crate::model::{BlockFamily, Coloring, DomainKind, FiniteSet, SpencerWitness};
use crate::search::{find_union_witness, MAX_UNION_BLOCKS};

/// Largest `n_0 + ... + n_{k*}` accepted.
pub const MAX_LAYOUT_BITS: u64 = 62;

/// Largest number of `c*` lookups spent on fingerprints at one level.
pub const MAX_FINGERPRINT_WORK: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalLayout {
    pub n_seq: Vec<u64>,
    /// `S_0, ..., S_{k*-1}`
    pub intervals: Vec<FiniteSet>,
    pub s_star: FiniteSet,
    /// `starts[i] = n_0 + ... + n_i`
    #[serde(skip)]
    starts: Vec<u64>,
}

impl IntervalLayout {
    pub fn k_star(&self) -> usize {
        self.intervals.len()
    }

    /// `m_i = 2^{n_0+...+n_i}`, for `i <= k*`.
    pub fn m_at(&self, i: usize) -> u64 {
        1u64 << self.starts[i]
    }

    /// `|S_i| = n_{i+1}`.
    pub fn width(&self, i: usize) -> u32 {
        self.n_seq[i + 1] as u32
    }

    /// Mask of `S_i`.
    pub fn level_mask(&self, i: usize) -> u64 {
        span(self.starts[i], self.starts[i + 1])
    }

    /// Mask of `S_0 ∪ ... ∪ S_{i-1}`.
    pub fn below_mask(&self, i: usize) -> u64 {
        span(self.starts[0], self.starts[i])
    }

    /// `exp2(S*)`.
    pub fn s_star_mask(&self) -> u64 {
        self.below_mask(self.k_star())
    }

    /// `alpha_i`: number of `(A, B)` contexts at level `i`.
    pub fn alpha(&self, i: usize) -> u64 {
        1u64 << (self.starts[i] - self.starts[0] + (self.k_star() - i - 1) as u64)
    }
}

/// Bits `lo..hi` set.
fn span(lo: u64, hi: u64) -> u64 {
    if hi == lo {
        0
    } else {
        (u64::MAX >> (64 - (hi - lo))) << lo
    }
}

fn mask_set(mask: u64) -> FiniteSet {
    FiniteSet::from_mask(mask)
}

fn set_mask(set: &FiniteSet) -> u64 {
    set.to_mask().expect("replay sets live below bit 64")
}

/// Lays out `S_0, ..., S_{k*-1}` from `n_0, ..., n_{k*}`.
pub fn build_layout(m: u64, p: u64, c: u64, k_star: usize, n_seq: &[u64]) -> Result<IntervalLayout> {
    if m == 0 || p == 0 || c == 0 {
        return Err(Error::Domain("m, p, c must be positive".into()));
    }
    if k_star == 0 {
        return Err(Error::Input("k* must be positive".into()));
    }
    if n_seq.len() != k_star + 1 {
        return Err(Error::Input(format!(
            "n sequence has {} entries, k*={k_star} needs {}",
            n_seq.len(),
            k_star + 1
        )));
    }
    if let Some(i) = n_seq[1..].iter().position(|&x| x == 0) {
        return Err(Error::Input(format!("n_{} must be positive", i + 1)));
    }
    let mut starts = Vec::with_capacity(n_seq.len());
    let mut acc = 0u64;
    for &x in n_seq {
        acc = acc.checked_add(x).filter(|&a| a <= MAX_LAYOUT_BITS).ok_or_else(|| {
            Error::Input(format!("n_0 + ... + n_{k_star} exceeds {MAX_LAYOUT_BITS}"))
        })?;
        starts.push(acc);
    }
    let intervals = (0..k_star)
        .map(|i| FiniteSet::interval(starts[i] as u32, (starts[i + 1] - 1) as u32))
        .collect();
    let s_star = FiniteSet::interval(starts[0] as u32, (starts[k_star] - 1) as u32);
    Ok(IntervalLayout { n_seq: n_seq.to_vec(), intervals, s_star, starts })
}

/// `c*(A) = c(exp2(A))` on non-empty `A ⊆ S*`.
#[derive(Debug, Clone, Copy)]
pub struct ColorStar<'a> {
    coloring: &'a Coloring,
    s_star: u64,
}

impl ColorStar<'_> {
    fn at(&self, mask: u64) -> u32 {
        debug_assert!(mask != 0 && mask & !self.s_star == 0);
        self.coloring.assign()[(mask - 1) as usize]
    }

    /// `c*(A)`; errors when `A` is empty or leaves `S*`.
    pub fn color(&self, a: &FiniteSet) -> Result<u32> {
        let mask = a.to_mask().filter(|&x| x != 0 && x & !self.s_star == 0);
        match mask {
            Some(x) => Ok(self.at(x)),
            None => Err(Error::Domain(format!("{a} is not a non-empty subset of S*"))),
        }
    }
}

/// The coloring `c*` of `P+(S*)`; the interval must reach `exp2(S*)`.
pub fn induced_colorstar<'a>(coloring: &'a Coloring, layout: &IntervalLayout) -> Result<ColorStar<'a>> {
    if coloring.kind() != DomainKind::Interval {
        return Err(Error::Input("the replay needs an interval coloring".into()));
    }
    let need = layout.s_star_mask();
    if u64::from(coloring.k()) < need {
        return Err(Error::Input(format!(
            "interval [{}] is too short: exp2(S*) = {need}",
            coloring.k()
        )));
    }
    Ok(ColorStar { coloring, s_star: need })
}

/// Rows per level; `levels[i]` is empty until level `i` is selected.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RowSelection {
    pub levels: Vec<Vec<FiniteSet>>,
}

impl RowSelection {
    pub fn new(k_star: usize) -> Self {
        RowSelection { levels: vec![Vec::new(); k_star] }
    }

    fn first_row(&self, j: usize) -> Result<u64> {
        self.levels
            .get(j)
            .and_then(|rows| rows.first())
            .map(set_mask)
            .ok_or_else(|| Error::State(format!("row w_{{{j},0}} has not been selected")))
    }

    /// `max w_{i1,*} < min w_{i2,*}` for all populated levels `i1 < i2`.
    pub fn is_separated(&self) -> bool {
        let spans: Vec<(u32, u32)> = self
            .levels
            .iter()
            .filter(|rows| !rows.is_empty())
            .map(|rows| {
                let lo = rows.iter().filter_map(FiniteSet::min).min().unwrap_or(0);
                let hi = rows.iter().filter_map(FiniteSet::max).max().unwrap_or(0);
                (lo, hi)
            })
            .collect();
        spans.windows(2).all(|w| w[0].1 < w[1].0)
    }
}

/// `v_p = w_{e_1,0} ∪ ... ∪ w_{e_r,0}` and `l* = m_{e_1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub e: Vec<usize>,
    pub l_star: u64,
}

/// Level-`i` fingerprint of `u ⊆ S_i`: `c*(A ∪ u ∪ ⋃_{j∈B} w_{j,0})` over all
/// `A ⊆ S_0 ∪ ... ∪ S_{i-1}` (major) and `B ⊆ {i+1, ..., k*-1}` (minor).
pub fn fingerprint(
    u: &FiniteSet,
    level: usize,
    layout: &IntervalLayout,
    rows: &RowSelection,
    colorstar: &ColorStar<'_>,
) -> Result<Vec<u32>> {
    if level >= layout.k_star() {
        return Err(Error::Input(format!("level {level} out of range")));
    }
    let um = u.to_mask().filter(|&x| x != 0 && x & !layout.level_mask(level) == 0).ok_or_else(|| {
        Error::Input(format!("{u} is not a non-empty subset of S_{level}"))
    })?;
    let ctx = Contexts::new(level, layout, rows)?;
    Ok(ctx.vector(um, colorstar))
}

/// Precomputed `(A, B)` contexts of one level.
struct Contexts {
    a_shift: u64,
    a_count: u64,
    b_unions: Vec<u64>,
}

impl Contexts {
    fn new(level: usize, layout: &IntervalLayout, rows: &RowSelection) -> Result<Self> {
        let above: Vec<u64> = (level + 1..layout.k_star()).map(|j| rows.first_row(j)).collect::<Result<_>>()?;
        let b_unions = (0..1u64 << above.len())
            .map(|b| above.iter().enumerate().filter(|(t, _)| b >> t & 1 == 1).fold(0, |acc, (_, w)| acc | w))
            .collect();
        Ok(Contexts {
            a_shift: layout.starts[0],
            a_count: 1u64 << (layout.starts[level] - layout.starts[0]),
            b_unions,
        })
    }

    fn vector(&self, u: u64, colorstar: &ColorStar<'_>) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.a_count as usize * self.b_unions.len());
        for a in 0..self.a_count {
            let base = (a << self.a_shift) | u;
            for b in &self.b_unions {
                out.push(colorstar.at(base | b));
            }
        }
        out
    }
}

/// Fingerprint classes of every non-empty `u ⊆ S_i`, as a subsets coloring
/// of the blocks `{s}`, `s ∈ S_i` (block `b` is the element `min S_i + b`).
/// Classes are numbered by first occurrence in increasing mask order.
fn class_coloring(
    layout: &IntervalLayout,
    colorstar: &ColorStar<'_>,
    level: usize,
    rows: &RowSelection,
) -> Result<Coloring> {
    let width = layout.width(level);
    if width > MAX_UNION_BLOCKS {
        return Err(Error::Input(format!(
            "|S_{level}| = {width} exceeds the replay limit {MAX_UNION_BLOCKS}"
        )));
    }
    let work = ((1u64 << width) - 1).saturating_mul(layout.alpha(level));
    if work > MAX_FINGERPRINT_WORK {
        return Err(Error::Input(format!(
            "level {level} needs {work} fingerprint lookups (limit {MAX_FINGERPRINT_WORK})"
        )));
    }
    let ctx = Contexts::new(level, layout, rows)?;
    let shift = layout.starts[level];
    let mut classes: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut assign = Vec::with_capacity((1usize << width) - 1);
    for t in 1..1u64 << width {
        let v = ctx.vector(t << shift, colorstar);
        let next = classes.len() as u32;
        assign.push(*classes.entry(v).or_insert(next));
    }
    Coloring::new(DomainKind::Subsets, width, classes.len() as u32, assign)
}

/// `c^alpha`, saturating.
fn color_budget(c: u64, alpha: u64) -> u64 {
    if c == 1 {
        return 1;
    }
    u32::try_from(alpha).ok().and_then(|a| c.checked_pow(a)).unwrap_or(u64::MAX)
}

/// Chooses `count` disjoint non-empty `w_{i,s} ⊆ S_i` whose non-empty unions
/// share one fingerprint. Rows of the higher levels must already be chosen.
pub fn select_rows(
    layout: &IntervalLayout,
    colorstar: &ColorStar<'_>,
    level: usize,
    count: u64,
    rows: &RowSelection,
) -> Result<Vec<FiniteSet>> {
    Ok(select_rows_counted(layout, colorstar, level, count, rows)?.0)
}

/// [`select_rows`] plus the number of fingerprint classes at the level.
fn select_rows_counted(
    layout: &IntervalLayout,
    colorstar: &ColorStar<'_>,
    level: usize,
    count: u64,
    rows: &RowSelection,
) -> Result<(Vec<FiniteSet>, u32)> {
    if level >= layout.k_star() {
        return Err(Error::Input(format!("level {level} out of range")));
    }
    let width = layout.width(level);
    if count > u64::from(width) {
        return Err(Error::Infeasible(format!(
            "level {level} needs {count} disjoint rows from |S_{level}| = {width} elements"
        )));
    }
    let classes = class_coloring(layout, colorstar, level, rows)?;
    let shift = layout.starts[level];
    let found = find_union_witness(&classes, count as u32, false)?.ok_or_else(|| {
        Error::Infeasible(format!("no {count} rows at level {level} with a common fingerprint"))
    })?;
    let rows = found
        .masks()
        .expect("block masks fit")
        .into_iter()
        .map(|m| mask_set(m << shift))
        .collect();
    Ok((rows, classes.colors()))
}

/// Ordered union witness of size `p+1` over `w_{0,0} < ... < w_{k*-1,0}`
/// under `c*`. Returns the `v`s and, for each, the levels it draws on.
pub fn hindman_select(
    colorstar: &ColorStar<'_>,
    first_rows: &[FiniteSet],
    p: u64,
) -> Result<(Vec<FiniteSet>, Vec<FiniteSet>)> {
    let k = first_rows.len() as u32;
    if k == 0 || k > MAX_UNION_BLOCKS {
        return Err(Error::Input(format!("hindman step over {k} blocks is out of range")));
    }
    BlockFamily::new(first_rows.to_vec(), true)?;
    if p + 1 > u64::from(k) {
        return Err(Error::Infeasible(format!("{} ordered unions need more than {k} blocks", p + 1)));
    }
    let masks: Vec<u64> = first_rows.iter().map(set_mask).collect();
    let union = |t: u64| (0..k as usize).filter(|j| t >> j & 1 == 1).fold(0, |acc, j| acc | masks[j]);
    let assign = (1..1u64 << k).map(|t| colorstar.color(&mask_set(union(t)))).collect::<Result<Vec<_>>>()?;
    let colors = assign.iter().max().map_or(1, |&x| x + 1);
    let recolored = Coloring::new(DomainKind::Subsets, k, colors, assign)?;
    let found = find_union_witness(&recolored, (p + 1) as u32, true)?
        .ok_or_else(|| Error::Infeasible(format!("no ordered {}-union witness over the first rows", p + 1)))?;
    let level_sets = found.d.clone();
    let v = found.masks().expect("fits").into_iter().map(|t| mask_set(union(t))).collect();
    Ok((v, level_sets))
}

/// Builds `H` from `v_0, ..., v_p` and the rows.
pub fn assemble_witness(
    m: u64,
    p: u64,
    v: &[FiniteSet],
    rows: &RowSelection,
    layout: &IntervalLayout,
) -> Result<(SpencerWitness, BlockDecomposition, Vec<FiniteSet>)> {
    let bug = |msg: String| Err(Error::Construction(msg));
    if v.len() as u64 != p + 1 {
        return bug(format!("expected {} head sets, got {}", p + 1, v.len()));
    }
    let p = p as usize;
    let vp = set_mask(&v[p]);
    let mut e = Vec::new();
    for j in 0..layout.k_star() {
        let part = vp & layout.level_mask(j);
        if part == 0 {
            continue;
        }
        if part != rows.first_row(j)? {
            return bug(format!("v_p meets S_{j} outside w_{{{j},0}}"));
        }
        e.push(j);
    }
    let Some(&e1) = e.first() else {
        return bug("v_p is empty".into());
    };
    let l_star = layout.m_at(e1);
    let mut all: Vec<u64> = v.iter().map(set_mask).collect();
    for s in 1..l_star as usize {
        let mut acc = 0u64;
        for &j in &e {
            let row = rows.levels[j].get(s).ok_or_else(|| {
                Error::Construction(format!("level {j} has fewer than {} rows", s + 1))
            })?;
            acc |= set_mask(row);
        }
        all.push(acc);
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i] & all[j] != 0 {
                return bug(format!("v_{i} and v_{j} intersect"));
            }
        }
    }
    let a: Vec<u64> = all.clone();
    let l = a.len() as u64;
    let head_ok = a[..p].windows(2).all(|w| w[0] < w[1]) && a[p..].iter().all(|&x| x > a[p - 1]);
    if !head_ok {
        return bug("head a_0 < ... < a_{p-1} < tail fails".into());
    }
    let floor = 1u64 << layout.n_seq[0];
    if !(a[0] >= floor && floor >= m) {
        return bug(format!("a_0 = {} >= 2^n_0 = {floor} >= m = {m} fails", a[0]));
    }
    if !(a[p - 1] <= l_star && l_star <= l) {
        return bug(format!("a_(p-1) = {} <= l* = {l_star} <= l = {l} fails", a[p - 1]));
    }
    let mut h = a;
    h.sort_unstable();
    let witness = SpencerWitness { m, p: p as u64, h };
    let sets = all.into_iter().map(mask_set).collect();
    Ok((witness, BlockDecomposition { e, l_star }, sets))
}

/// Outcome of [`verify_spencer`]: `violation` names the first failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpencerReport {
    pub valid: bool,
    pub violation: Option<String>,
}

impl SpencerReport {
    fn fail(msg: String) -> Self {
        SpencerReport { valid: false, violation: Some(msg) }
    }
}

/// Checks, in order: `H` strictly increasing and positive, `m ≤ a₀`,
/// `p ≤ l`, `a_{p−1} ≤ l`, `ΣH ⊆ [k]`, and `ΣH` monochromatic.
pub fn verify_spencer(coloring: &Coloring, witness: &SpencerWitness) -> SpencerReport {
    let h = &witness.h;
    if coloring.kind() != DomainKind::Interval {
        return SpencerReport::fail("coloring is not an interval coloring".into());
    }
    if h.is_empty() {
        return SpencerReport::fail("H is empty".into());
    }
    if h[0] == 0 || h.windows(2).any(|w| w[0] >= w[1]) {
        return SpencerReport::fail("H is not a strictly increasing set of positive integers".into());
    }
    if witness.m == 0 || witness.p == 0 {
        return SpencerReport::fail("m and p must be positive".into());
    }
    let l = h.len() as u64;
    if witness.m > h[0] {
        return SpencerReport::fail("m ≤ a₀ violated".into());
    }
    if witness.p > l {
        return SpencerReport::fail("p ≤ l violated".into());
    }
    if h[(witness.p - 1) as usize] > l {
        return SpencerReport::fail("a_{p−1} ≤ l violated".into());
    }
    let total = h.iter().try_fold(0u64, |acc, &x| acc.checked_add(x));
    let k = u64::from(coloring.k());
    let total = match total {
        Some(t) if t <= k => t,
        Some(t) => return SpencerReport::fail(format!("sum {t} outside [k]")),
        None => return SpencerReport::fail("sum overflows outside [k]".into()),
    };
    // Subset sums by a reachability sweep over 0..=total.
    let mut reach = vec![false; total as usize + 1];
    reach[0] = true;
    for &x in h {
        for s in (x as usize..=total as usize).rev() {
            if reach[s - x as usize] {
                reach[s] = true;
            }
        }
    }
    let color = coloring.assign()[(total - 1) as usize];
    for s in 1..=total as usize {
        if reach[s] && coloring.assign()[s - 1] != color {
            return SpencerReport::fail(format!("sums {s} and {total} have different colors"));
        }
    }
    SpencerReport { valid: true, violation: None }
}

/// True when, at every level with rows, all non-empty unions of the rows
/// share the fingerprint of `w_{i,0}`.
pub fn audit_row_equivalence(rows: &RowSelection, colorstar: &ColorStar<'_>, layout: &IntervalLayout) -> Result<bool> {
    for level in 0..layout.k_star() {
        let level_rows = &rows.levels[level];
        if level_rows.is_empty() {
            continue;
        }
        if level_rows.len() as u32 > MAX_UNION_BLOCKS {
            return Err(Error::Input(format!("level {level} has too many rows to audit")));
        }
        let family = BlockFamily::new(level_rows.clone(), false)?;
        let ctx = Contexts::new(level, layout, rows)?;
        let masks: Vec<u64> = level_rows.iter().map(set_mask).collect();
        if masks.iter().any(|&w| w & !layout.level_mask(level) != 0) {
            return Ok(false);
        }
        let reference = ctx.vector(masks[0], colorstar);
        for t in 2..1u64 << family.len() {
            let u = (0..masks.len()).filter(|s| t >> s & 1 == 1).fold(0, |acc, s| acc | masks[s]);
            if ctx.vector(u, colorstar) != reference {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Where `n_0, ..., n_{k*}` come from.
#[derive(Debug, Clone)]
pub enum ReplayParams {
    /// Run the recursion against these oracles.
    Recursion(OracleTable),
    /// Use this sequence; `k*` is its length minus one.
    Supplied(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub m_i: u64,
    pub alpha_i: u64,
    pub fingerprint_classes: u32,
    pub rows: Vec<FiniteSet>,
}

/// Every intermediate object of one replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub m: u64,
    pub p: u64,
    pub c: u64,
    pub k: u32,
    pub trace: Option<BoundTrace>,
    pub layout: IntervalLayout,
    /// In selection order (`k*-1` down to 0).
    pub levels: Vec<LevelRecord>,
    /// Level indices used by each `v_0, ..., v_p`.
    pub hindman_levels: Vec<FiniteSet>,
    /// `v_0, ..., v_{l-1}`: ordered head, then the tail.
    pub v: Vec<FiniteSet>,
    pub decomposition: BlockDecomposition,
    pub rows_separated: bool,
    pub audit: bool,
    pub witness: SpencerWitness,
}

/// The whole pipeline; the returned witness has passed [`verify_spencer`].
pub fn extract(m: u64, p: u64, c: u64, coloring: &Coloring, params: &ReplayParams) -> Result<Transcript> {
    if coloring.kind() != DomainKind::Interval {
        return Err(Error::Input("the replay needs an interval coloring".into()));
    }
    if u64::from(coloring.colors()) > c {
        return Err(Error::Input(format!("coloring uses {} colors, more than c = {c}", coloring.colors())));
    }
    let (trace, n_seq) = match params {
        ReplayParams::Supplied(seq) => (None, seq.clone()),
        ReplayParams::Recursion(oracles) => {
            let trace = spencer_bound(m, p, c, oracles, DEFAULT_BIT_BUDGET)?;
            let seq = trace
                .n_seq
                .iter()
                .map(|x| x.to_u64())
                .collect::<Option<Vec<u64>>>()
                .filter(|_| trace.k_star.is_exact() && trace.bound_operative.to_u64().is_some())
                .ok_or_else(|| Error::Input("recursion values are too large to replay".into()))?;
            (Some(trace), seq)
        }
    };
    if n_seq.len() < 2 {
        return Err(Error::Input("n sequence needs at least two entries".into()));
    }
    let layout = build_layout(m, p, c, n_seq.len() - 1, &n_seq)?;
    let k_star = layout.k_star();
    let operative = layout.m_at(k_star);
    if u64::from(coloring.k()) < operative {
        return Err(Error::Input(format!(
            "interval [{}] is shorter than the operative bound {operative}",
            coloring.k()
        )));
    }
    let colorstar = induced_colorstar(coloring, &layout)?;

    let mut rows = RowSelection::new(k_star);
    let mut levels = Vec::with_capacity(k_star);
    for i in (0..k_star).rev() {
        let count = layout.m_at(i);
        let (chosen, classes) = select_rows_counted(&layout, &colorstar, i, count, &rows)?;
        let alpha = layout.alpha(i);
        if u64::from(classes) > color_budget(c, alpha) {
            return Err(Error::Construction(format!(
                "level {i} has {classes} fingerprint classes, more than c^alpha = {c}^{alpha}"
            )));
        }
        rows.levels[i] = chosen.clone();
        levels.push(LevelRecord { level: i, m_i: count, alpha_i: alpha, fingerprint_classes: classes, rows: chosen });
    }
    let rows_separated = rows.is_separated();
    if !rows_separated {
        return Err(Error::Construction("rows of different levels are not separated".into()));
    }

    let first_rows: Vec<FiniteSet> = rows.levels.iter().map(|r| r[0].clone()).collect();
    let (head, hindman_levels) = hindman_select(&colorstar, &first_rows, p)?;
    let (witness, decomposition, v) = assemble_witness(m, p, &head, &rows, &layout)?;
    let report = verify_spencer(coloring, &witness);
    if !report.valid {
        return Err(Error::Construction(format!(
            "assembled witness fails verification: {}",
            report.violation.unwrap_or_default()
        )));
    }
    let audit = audit_row_equivalence(&rows, &colorstar, &layout)?;
    if !audit {
        return Err(Error::Construction("row equivalence audit failed".into()));
    }
    Ok(Transcript {
        m,
        p,
        c,
        k: coloring.k(),
        trace,
        layout,
        levels,
        hindman_levels,
        v,
        decomposition,
        rows_separated,
        audit,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchBudget;

    fn s(v: &[u32]) -> FiniteSet {
        FiniteSet::new(v.iter().copied())
    }

    fn one_color(k: u32) -> Coloring {
        Coloring::constant(DomainKind::Interval, k, 1).unwrap()
    }

    fn exact() -> ReplayParams {
        ReplayParams::Recursion(OracleTable::exact(SearchBudget { max_k: 6, max_nodes: 1_000_000, threads: 1 }))
    }

    #[test]
    fn layouts() {
        let l = build_layout(1, 1, 1, 2, &[0, 1, 2]).unwrap();
        assert_eq!(l.intervals, vec![s(&[0]), s(&[1, 2])]);
        assert_eq!(l.s_star, s(&[0, 1, 2]));
        assert_eq!(l.s_star_mask(), 7);
        assert_eq!((l.m_at(0), l.m_at(1), l.m_at(2)), (1, 2, 8));
        let l = build_layout(1, 1, 1, 2, &[1, 1, 1]).unwrap();
        assert_eq!(l.intervals, vec![s(&[1]), s(&[2])]);
        assert!(matches!(build_layout(1, 1, 1, 2, &[0, 1]), Err(Error::Input(_))));
        assert!(matches!(build_layout(1, 1, 1, 1, &[0, 0]), Err(Error::Input(_))));
        assert!(matches!(build_layout(1, 1, 1, 1, &[40, 40]), Err(Error::Input(_))));
    }

    #[test]
    fn colorstar_reads_exp2() {
        let l = build_layout(1, 1, 1, 2, &[0, 1, 2]).unwrap();
        let col = Coloring::new(DomainKind::Interval, 8, 2, vec![1, 0, 0, 0, 0, 0, 0, 1]).unwrap();
        let cs = induced_colorstar(&col, &l).unwrap();
        assert_eq!(cs.color(&s(&[0])).unwrap(), 1);
        assert_eq!(cs.color(&s(&[0, 1, 2])).unwrap(), 0);
        assert!(cs.color(&s(&[3])).is_err());
        assert!(matches!(induced_colorstar(&one_color(4), &l), Err(Error::Input(_))));
        assert!(induced_colorstar(&one_color(7), &l).is_ok());
    }

    #[test]
    fn fingerprint_shapes() {
        let l = build_layout(1, 1, 1, 2, &[0, 1, 2]).unwrap();
        let col = one_color(8);
        let cs = induced_colorstar(&col, &l).unwrap();
        let mut rows = RowSelection::new(2);
        // Top level: A ranges over P(S_0), B over ∅ only.
        assert_eq!(fingerprint(&s(&[1]), 1, &l, &rows, &cs).unwrap().len(), 2);
        assert!(matches!(fingerprint(&s(&[0]), 0, &l, &rows, &cs), Err(Error::State(_))));
        rows.levels[1] = vec![s(&[1]), s(&[2])];
        assert_eq!(fingerprint(&s(&[0]), 0, &l, &rows, &cs).unwrap(), vec![0, 0]);
        assert!(matches!(fingerprint(&s(&[1]), 0, &l, &rows, &cs), Err(Error::Input(_))));
    }

    #[test]
    fn row_selection_1_1_1() {
        let l = build_layout(1, 1, 1, 2, &[0, 1, 2]).unwrap();
        let col = one_color(8);
        let cs = induced_colorstar(&col, &l).unwrap();
        let mut rows = RowSelection::new(2);
        rows.levels[1] = select_rows(&l, &cs, 1, 2, &rows).unwrap();
        assert_eq!(rows.levels[1], vec![s(&[1]), s(&[2])]);
        rows.levels[0] = select_rows(&l, &cs, 0, 1, &rows).unwrap();
        assert_eq!(rows.levels[0], vec![s(&[0])]);
        let (v, levels) = hindman_select(&cs, &[s(&[0]), s(&[1])], 1).unwrap();
        assert_eq!(v, vec![s(&[0]), s(&[1])]);
        assert_eq!(levels, vec![s(&[0]), s(&[1])]);
        assert!(matches!(hindman_select(&cs, &[s(&[0]), s(&[1])], 2), Err(Error::Infeasible(_))));
        let (w, dec, all) = assemble_witness(1, 1, &v, &rows, &l).unwrap();
        assert_eq!(w.h, vec![1, 2, 4]);
        assert_eq!(dec, BlockDecomposition { e: vec![1], l_star: 2 });
        assert_eq!(all, vec![s(&[0]), s(&[1]), s(&[2])]);
    }

    #[test]
    fn pigeonhole_rows_are_infeasible() {
        let l = build_layout(1, 1, 1, 2, &[0, 1, 1]).unwrap();
        let col = one_color(8);
        let cs = induced_colorstar(&col, &l).unwrap();
        let rows = RowSelection::new(2);
        assert!(matches!(select_rows(&l, &cs, 1, 2, &rows), Err(Error::Infeasible(_))));
        let r = extract(1, 1, 1, &one_color(8), &ReplayParams::Supplied(vec![0, 1, 1]));
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn extract_1_1_1() {
        let t = extract(1, 1, 1, &one_color(8), &exact()).unwrap();
        assert_eq!(t.witness.h, vec![1, 2, 4]);
        assert_eq!(t.v, vec![s(&[0]), s(&[1]), s(&[2])]);
        assert!(t.audit && t.rows_separated);
        assert!(verify_spencer(&one_color(8), &t.witness).valid);
        assert!(t.levels.iter().all(|r| r.fingerprint_classes == 1));
        assert!(matches!(extract(1, 1, 1, &one_color(4), &exact()), Err(Error::Input(_))));
        assert!(matches!(extract(1, 1, 1, &one_color(7), &exact()), Err(Error::Input(_))));
    }

    #[test]
    fn extract_2_1_1() {
        let t = extract(2, 1, 1, &one_color(2048), &exact()).unwrap();
        assert_eq!(t.layout.n_seq, vec![1, 2, 8]);
        assert_eq!(t.witness.h, vec![2, 8, 16, 32, 64, 128, 256, 512, 1024]);
        assert!(t.witness.h[0] >= 2);
        assert_eq!(t.decomposition.l_star, 8);
    }

    #[test]
    fn extract_with_two_colors() {
        // Alternating colors on [8] with the (1,1,1) layout.
        let col = Coloring::new(DomainKind::Interval, 8, 2, vec![0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
        let r = extract(1, 1, 2, &col, &ReplayParams::Supplied(vec![0, 1, 2]));
        match r {
            Ok(t) => assert!(verify_spencer(&col, &t.witness).valid),
            Err(e) => assert!(matches!(e, Error::Infeasible(_)), "{e}"),
        }
    }

    #[test]
    fn verify_reports() {
        let w = SpencerWitness { m: 1, p: 1, h: vec![1, 2, 4] };
        assert!(verify_spencer(&one_color(8), &w).valid);
        assert_eq!(verify_spencer(&one_color(4), &w).violation.as_deref(), Some("sum 7 outside [k]"));
        let w = SpencerWitness { m: 3, p: 1, h: vec![1, 2] };
        assert_eq!(verify_spencer(&one_color(1), &w).violation.as_deref(), Some("m ≤ a₀ violated"));
        let w = SpencerWitness { m: 1, p: 3, h: vec![1, 2] };
        assert_eq!(verify_spencer(&one_color(8), &w).violation.as_deref(), Some("p ≤ l violated"));
        let w = SpencerWitness { m: 1, p: 1, h: vec![3, 4] };
        assert_eq!(verify_spencer(&one_color(8), &w).violation.as_deref(), Some("a_{p−1} ≤ l violated"));
        let col = Coloring::new(DomainKind::Interval, 3, 2, vec![0, 0, 1]).unwrap();
        let w = SpencerWitness { m: 1, p: 1, h: vec![1, 2] };
        assert!(!verify_spencer(&col, &w).valid);
    }

    #[test]
    fn audit_detects_tampering() {
        let col = Coloring::new(DomainKind::Interval, 2048, 2, (0..2048).map(|i| (i % 3 == 0) as u32).collect())
            .unwrap();
        let l = build_layout(2, 1, 2, 2, &[1, 2, 8]).unwrap();
        let cs = induced_colorstar(&col, &l).unwrap();
        let mut rows = RowSelection::new(2);
        rows.levels[1] = select_rows(&l, &cs, 1, 2, &rows).unwrap();
        rows.levels[0] = select_rows(&l, &cs, 0, 1, &rows).unwrap();
        assert!(audit_row_equivalence(&rows, &cs, &l).unwrap());
        let mut found_break = false;
        for replacement in 1..1u64 << 8 {
            let mut bad = rows.clone();
            bad.levels[1][1] = mask_set(replacement << 3);
            if BlockFamily::new(bad.levels[1].clone(), false).is_err() {
                continue;
            }
            if !audit_row_equivalence(&bad, &cs, &l).unwrap() {
                found_break = true;
                break;
            }
        }
        assert!(found_break);
    }
}
