//! Witness search inside a single coloring.
//!
//! Two flavours live here. The public `find_*` functions scan a complete
//! coloring and return the canonical (tie-broken) witness. The `*Closure`
//! types answer the narrower question the coloring search asks after each
//! cell is colored: does a witness exist whose largest cell is exactly `t`?

use crate::error::{Error, Result};
use crate::model::{Coloring, DomainKind, SpencerWitness, UnionWitness};

use super::bits::{Bits, CAPACITY};

/// Largest interval length accepted by the Spencer witness search.
pub const MAX_INTERVAL_CELLS: u32 = (CAPACITY - 1) as u32;

/// Largest block count accepted by the union witness search.
pub const MAX_UNION_BLOCKS: u32 = 20;

/// Per-color cell masks of a whole interval coloring, colors renumbered densely.
fn interval_masks(coloring: &Coloring) -> (Vec<usize>, Vec<Bits>) {
    let mut dense = std::collections::HashMap::new();
    let mut masks: Vec<Bits> = Vec::new();
    let mut color = Vec::with_capacity(coloring.assign().len() + 1);
    color.push(usize::MAX);
    for (i, &c) in coloring.assign().iter().enumerate() {
        let next = dense.len();
        let d = *dense.entry(c).or_insert(next);
        if d == masks.len() {
            masks.push(Bits::default());
        }
        masks[d].set(i + 1);
        color.push(d);
    }
    (color, masks)
}

/// Finds the Spencer witness with the fewest elements, then the
/// lexicographically least one, among all `H` whose sum-set fits in `[k]`.
pub fn find_spencer_witness(coloring: &Coloring, m: u64, p: u64) -> Result<Option<SpencerWitness>> {
    if coloring.kind() != DomainKind::Interval {
        return Err(Error::Input("Spencer witness search needs an interval coloring".into()));
    }
    if m == 0 || p == 0 {
        return Err(Error::Domain("m and p must be positive".into()));
    }
    let k = coloring.k();
    if k > MAX_INTERVAL_CELLS {
        return Err(Error::Input(format!(
            "interval of length {k} exceeds the witness search limit {MAX_INTERVAL_CELLS}"
        )));
    }
    let (color, masks) = interval_masks(coloring);
    let search = SpencerFind { k: k as u64, m, p, color: &color, masks: &masks };
    let mut h = Vec::new();
    let mut l = p;
    // Smallest possible sum of l elements that are all >= m.
    while l * m + l * (l - 1) / 2 <= k as u64 {
        if search.extend(l as usize, &mut h, Bits::single(0), 0, None) {
            return Ok(Some(SpencerWitness { m, p, h }));
        }
        l += 1;
    }
    Ok(None)
}

struct SpencerFind<'a> {
    k: u64,
    m: u64,
    p: u64,
    color: &'a [usize],
    masks: &'a [Bits],
}

impl SpencerFind<'_> {
    fn extend(&self, len: usize, h: &mut Vec<u64>, sums: Bits, total: u64, mask: Option<Bits>) -> bool {
        if h.len() == len {
            return true;
        }
        let slots = (len - h.len()) as u64;
        let start = h.last().map_or(self.m, |&x| x + 1);
        let mut x = start;
        loop {
            if total + slots * x + slots * (slots - 1) / 2 > self.k {
                return false;
            }
            // x becomes a_{p-1}; it must not exceed l.
            if h.len() as u64 + 1 == self.p && x > len as u64 {
                return false;
            }
            let target = mask.unwrap_or(self.masks[self.color[x as usize]]);
            let shifted = sums.shl(x as usize);
            if shifted.is_subset_of(&target) {
                h.push(x);
                if self.extend(len, h, sums.or(&shifted), total + x, Some(target)) {
                    return true;
                }
                h.pop();
            }
            x += 1;
        }
    }
}

/// Existence of a Spencer witness whose total sum is exactly `t`.
pub(crate) struct SpencerClosure {
    m: u64,
    p: u64,
}

impl SpencerClosure {
    pub fn new(m: u64, p: u64) -> Self {
        SpencerClosure { m: m.max(1), p: p.max(1) }
    }

    /// `assign[i-1]` is the color of integer `i`; `masks[c]` holds the
    /// integers colored `c` among `1..=t`.
    pub fn closes(&self, t: usize, assign: &[u8], masks: &[Bits]) -> bool {
        let ctx = SpencerCtx { t: t as u64, m: self.m, p: self.p, assign, masks };
        ctx.step(0, 0, Bits::single(0), 0, None, None)
    }
}

struct SpencerCtx<'a> {
    t: u64,
    m: u64,
    p: u64,
    assign: &'a [u8],
    masks: &'a [Bits],
}

/// Most elements, all above `last`, that fit in a remaining budget `r`.
fn max_more(last: u64, r: u64) -> u64 {
    let mut j = 0u64;
    let mut used = 0u64;
    loop {
        let next = last + j + 1;
        if used + next > r {
            return j;
        }
        used += next;
        j += 1;
    }
}

impl SpencerCtx<'_> {
    fn step(&self, count: u64, last: u64, sums: Bits, total: u64, mask: Option<Bits>, a_pm1: Option<u64>) -> bool {
        let r = self.t - total;
        if r == 0 {
            return count >= self.p && a_pm1.is_some_and(|a| a <= count);
        }
        if let Some(a) = a_pm1 {
            if count + max_more(last, r) < a {
                return false;
            }
        }
        let lo = if count == 0 { self.m } else { last + 1 };
        let becomes_pm1 = count + 1 == self.p;
        // A non-final element must leave room for a larger one: x <= (r-1)/2.
        for x in lo..=(r - 1) / 2 {
            if becomes_pm1 && count + 1 + max_more(x, r - x) < x {
                break;
            }
            if self.try_elem(count, x, sums, total, mask, a_pm1) {
                return true;
            }
        }
        // Closing element x == r.
        r >= lo && !(becomes_pm1 && count + 1 < r) && self.try_elem(count, r, sums, total, mask, a_pm1)
    }

    #[inline]
    fn try_elem(&self, count: u64, x: u64, sums: Bits, total: u64, mask: Option<Bits>, a_pm1: Option<u64>) -> bool {
        let target = match mask {
            Some(m) => m,
            None => self.masks[self.assign[(x - 1) as usize] as usize],
        };
        let shifted = sums.shl(x as usize);
        if !shifted.is_subset_of(&target) {
            return false;
        }
        let a_pm1 = if count + 1 == self.p { Some(x) } else { a_pm1 };
        self.step(count + 1, x, sums.or(&shifted), total + x, Some(target), a_pm1)
    }
}

/// Finds `n` blocks-unions with disjoint supports whose non-empty unions are
/// monochromatic. Tie-break: lexicographically least sequence of support
/// bitmasks, listed in increasing bitmask order.
pub fn find_union_witness(coloring: &Coloring, n: u32, ordered: bool) -> Result<Option<UnionWitness>> {
    if coloring.kind() != DomainKind::Subsets {
        return Err(Error::Input("union witness search needs a subsets coloring".into()));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let k = coloring.k();
    if k > MAX_UNION_BLOCKS {
        return Err(Error::Input(format!(
            "{k} blocks exceeds the union witness search limit {MAX_UNION_BLOCKS}"
        )));
    }
    if n > k {
        return Ok(None);
    }
    let search = UnionFind { full: (1u64 << k) - 1, n: n as usize, ordered, assign: coloring.assign() };
    let mut chosen = Vec::with_capacity(n as usize);
    let mut unions = Vec::with_capacity((1usize << n) - 1);
    if search.extend(&mut chosen, &mut unions, 0, None) {
        Ok(Some(UnionWitness::from_masks(ordered, &chosen)))
    } else {
        Ok(None)
    }
}

struct UnionFind<'a> {
    full: u64,
    n: usize,
    ordered: bool,
    assign: &'a [u32],
}

impl UnionFind<'_> {
    fn extend(&self, chosen: &mut Vec<u64>, unions: &mut Vec<u64>, used: u64, color: Option<u32>) -> bool {
        if chosen.len() == self.n {
            return true;
        }
        let need = (self.n - chosen.len()) as u32;
        let free = if self.ordered {
            let floor = if used == 0 { 0 } else { 64 - used.leading_zeros() };
            self.full & !((1u64 << floor) - 1)
        } else {
            self.full & !used
        };
        if free.count_ones() < need {
            return false;
        }
        let prev = chosen.last().copied().unwrap_or(0);
        // Enumerate submasks of `free` above `prev` in increasing order.
        let mut d = next_submask_above(free, prev);
        while let Some(cur) = d {
            let rest = free & !cur;
            let room = if self.ordered {
                let top = 64 - cur.leading_zeros();
                (rest >> top).count_ones()
            } else {
                rest.count_ones()
            };
            if room + 1 >= need {
                let col = color.unwrap_or(self.assign[(cur - 1) as usize]);
                let base = unions.len();
                let mut ok = self.assign[(cur - 1) as usize] == col;
                if ok {
                    unions.push(cur);
                    for i in 0..base {
                        let u = unions[i] | cur;
                        if self.assign[(u - 1) as usize] != col {
                            ok = false;
                            break;
                        }
                        unions.push(u);
                    }
                }
                if ok {
                    chosen.push(cur);
                    if self.extend(chosen, unions, used | cur, Some(col)) {
                        return true;
                    }
                    chosen.pop();
                }
                unions.truncate(base);
            }
            d = next_submask_above(free, cur);
        }
        false
    }
}

/// Smallest non-zero submask of `space` strictly greater than `after`.
fn next_submask_above(space: u64, after: u64) -> Option<u64> {
    // Submasks of `space` in increasing order correspond to counting in the
    // compressed coordinates of `space`.
    let mut x = after;
    loop {
        // Increment x restricted to the bits of `space`: (x | !space) + 1, masked.
        let next = (x | !space).wrapping_add(1) & space;
        if next == 0 {
            return None;
        }
        if next > after {
            return Some(next);
        }
        x = next;
    }
}

/// Existence of a union witness whose total union is exactly the cell `t`.
pub(crate) struct UnionClosure {
    stride: usize,
    /// For each cell t: flattened lists of the `2^n - 1` union cells of every
    /// admissible split of `t` into `n` parts.
    splits: Vec<Vec<u8>>,
}

impl UnionClosure {
    /// Precomputes splits for cells `1..=cells` (cells < 256).
    pub fn new(n: u32, ordered: bool, cells: usize) -> Self {
        assert!(cells < CAPACITY, "subsets search limited to {} cells", CAPACITY - 1);
        let n = n as usize;
        let stride = (1usize << n) - 1;
        let mut splits = vec![Vec::new(); cells + 1];
        for (t, slot) in splits.iter_mut().enumerate().skip(1) {
            let bits: Vec<u32> = (0..64).filter(|b| (t >> b) & 1 == 1).collect();
            if bits.len() < n {
                continue;
            }
            let mut parts = vec![0u64; n];
            let mut emit = |parts: &[u64]| {
                for sel in 1usize..=stride {
                    let mut u = 0u64;
                    for (i, p) in parts.iter().enumerate() {
                        if sel >> i & 1 == 1 {
                            u |= p;
                        }
                    }
                    slot.push(u as u8);
                }
            };
            if ordered {
                compositions(&bits, n, 0, &mut parts, &mut emit);
            } else {
                set_partitions(&bits, n, 0, 0, &mut parts, &mut emit);
            }
        }
        UnionClosure { stride, splits }
    }

    pub fn closes(&self, t: usize, assign: &[u8]) -> bool {
        let col = assign[t - 1];
        self.splits[t]
            .chunks_exact(self.stride)
            .any(|cells| cells.iter().all(|&u| assign[u as usize - 1] == col))
    }
}

/// Splits the sorted `bits` into `n` consecutive non-empty runs.
fn compositions(bits: &[u32], n: usize, part: usize, parts: &mut [u64], emit: &mut impl FnMut(&[u64])) {
    if part == n - 1 {
        parts[part] = bits.iter().fold(0, |a, &b| a | (1u64 << b));
        emit(parts);
        parts[part] = 0;
        return;
    }
    let remaining_parts = n - part;
    for take in 1..=bits.len() + 1 - remaining_parts {
        parts[part] = bits[..take].iter().fold(0, |a, &b| a | (1u64 << b));
        compositions(&bits[take..], n, part + 1, parts, emit);
    }
    parts[part] = 0;
}

/// Set partitions of `bits` into exactly `n` non-empty blocks (restricted
/// growth strings; blocks are numbered by first appearance).
fn set_partitions(bits: &[u32], n: usize, idx: usize, opened: usize, parts: &mut [u64], emit: &mut impl FnMut(&[u64])) {
    if idx == bits.len() {
        if opened == n {
            emit(parts);
        }
        return;
    }
    if n - opened > bits.len() - idx {
        return;
    }
    let b = 1u64 << bits[idx];
    for blk in 0..(opened + 1).min(n) {
        parts[blk] |= b;
        set_partitions(bits, n, idx + 1, opened.max(blk + 1), parts, emit);
        parts[blk] &= !b;
    }
}
