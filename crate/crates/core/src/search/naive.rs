//! Brute-force reference for the threshold computations.
//!
//! Every coloring of every level is enumerated outright (no pruning, no
//! color canonicalization) and each one is checked against an explicit list
//! of candidate witnesses built from `sum_set` and `nu`. Nothing here is
//! shared with the pruned search beyond the value types.

use crate::error::{Error, Result};
use crate::model::{nu, sum_set, BlockFamily, Coloring, FiniteSet};

use super::{BadColoringCertificate, Problem, SearchBudget, SearchOutcome, Status};

/// Levels with more cells than this are not enumerated.
pub const MAX_NAIVE_CELLS: usize = 64;

/// Same contract as [`super::compute`]; `budget.max_nodes` bounds the number
/// of colorings examined. `budget.threads` is ignored. Enumeration stops
/// (with `Unknown`) at the first level above [`MAX_NAIVE_CELLS`] cells.
pub fn naive_compute(problem: Problem, c: u32, budget: SearchBudget) -> Result<SearchOutcome> {
    if c == 0 {
        return Err(Error::Domain("c must be positive".into()));
    }
    let kind = problem.domain();
    let mut examined = 0u64;
    let mut last_bad: Option<Coloring> = None;
    let finish = |status, value, bad: Option<Coloring>, examined| SearchOutcome {
        status,
        value,
        lower_certificate: bad.map(|coloring| BadColoringCertificate { problem, coloring }),
        nodes_explored: examined,
    };

    for k in 1..=budget.max_k {
        let cells = Coloring::cell_count(kind, k)? as usize;
        if cells > MAX_NAIVE_CELLS {
            break;
        }
        // Cell `t` is bit `cells - t`, so counting up walks colorings in
        // lexicographic order with cell 1 most significant.
        let bit = |t: u64| 1u64 << (cells as u64 - t);
        let candidates: Vec<u64> = candidate_cell_sets(problem, k)?
            .iter()
            .map(|set| set.iter().fold(0, |acc, &t| acc | bit(t)))
            .collect();
        if c == 2 {
            // Two colors: the coloring is the counter itself (bit set = color 1).
            let full = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };
            let mut x = 0u64;
            let mut bad = None;
            loop {
                examined += 1;
                if examined > budget.max_nodes {
                    let value = last_bad.as_ref().map_or(1, |b| b.k() as u64 + 1);
                    return Ok(finish(Status::Unknown, value, last_bad, budget.max_nodes));
                }
                if !candidates.iter().any(|&cm| x & cm == cm || x & cm == 0) {
                    bad = Some((1..=cells as u64).map(|t| (x & bit(t) != 0) as u32).collect());
                    break;
                }
                if x == full {
                    break;
                }
                x += 1;
            }
            match bad {
                Some(assign) => {
                    last_bad = Some(Coloring::new(kind, k, c, assign)?);
                    continue;
                }
                None => return Ok(finish(Status::Exact, k as u64, last_bad, examined)),
            }
        }
        let mut digits = vec![0u32; cells];
        let mut masks = vec![0u64; c as usize];
        masks[0] = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };
        let mut bad = None;
        loop {
            examined += 1;
            if examined > budget.max_nodes {
                let value = last_bad.as_ref().map_or(1, |b| b.k() as u64 + 1);
                return Ok(finish(Status::Unknown, value, last_bad, budget.max_nodes));
            }
            let has_witness = candidates.iter().any(|&cm| masks.iter().any(|&m| m & cm == cm));
            if !has_witness {
                bad = Some(digits.clone());
                break;
            }
            if !advance(&mut digits, &mut masks, c) {
                break;
            }
        }
        match bad {
            Some(assign) => last_bad = Some(Coloring::new(kind, k, c, assign)?),
            None => return Ok(finish(Status::Exact, k as u64, last_bad, examined)),
        }
    }
    let value = last_bad.as_ref().map_or(1, |b| b.k() as u64 + 1);
    Ok(finish(Status::Unknown, value, last_bad, examined))
}

/// Next coloring in lexicographic order (cell 1 most significant), keeping
/// the per-color cell masks in step.
fn advance(digits: &mut [u32], masks: &mut [u64], c: u32) -> bool {
    let len = digits.len();
    for (i, slot) in digits.iter_mut().enumerate().rev() {
        let b = 1u64 << (len - 1 - i);
        masks[*slot as usize] &= !b;
        *slot += 1;
        if *slot < c {
            masks[*slot as usize] |= b;
            return true;
        }
        *slot = 0;
        masks[0] |= b;
    }
    false
}

/// For each admissible witness at level `k`, the list of cells that must
/// share one color.
fn candidate_cell_sets(problem: Problem, k: u32) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    match problem {
        Problem::Sp { m, p } => {
            let mut h = Vec::new();
            spencer_sets(k as u64, m.max(1), &mut h, &mut |h| {
                let w = crate::model::SpencerWitness { m, p, h: h.to_vec() };
                if w.satisfies_size_conditions() {
                    out.push(sum_set(h).expect("non-empty distinct").into_iter().collect());
                }
            });
        }
        Problem::U { n } | Problem::Hind { n } => {
            let ordered = matches!(problem, Problem::Hind { .. });
            let all: Vec<FiniteSet> = (1u64..(1u64 << k)).map(FiniteSet::from_mask).collect();
            let mut chosen: Vec<FiniteSet> = Vec::new();
            union_families(&all, n as usize, 0, &mut chosen, &mut |family| {
                if let Ok(fam) = BlockFamily::new(family.to_vec(), ordered) {
                    let cells = nu(&fam).iter().map(|u| u.to_mask().expect("small")).collect();
                    out.push(cells);
                }
            });
        }
    }
    Ok(out)
}

/// All strictly increasing sequences with first element >= `lo` and sum <= `k`.
fn spencer_sets(k: u64, lo: u64, h: &mut Vec<u64>, emit: &mut impl FnMut(&[u64])) {
    let total: u64 = h.iter().sum();
    let start = h.last().map_or(lo, |&x| x + 1);
    for x in start..=k.saturating_sub(total) {
        h.push(x);
        emit(h);
        spencer_sets(k, lo, h, emit);
        h.pop();
    }
}

/// All `n`-element selections (in index order) from `all`.
fn union_families(all: &[FiniteSet], n: usize, from: usize, chosen: &mut Vec<FiniteSet>, emit: &mut impl FnMut(&[FiniteSet])) {
    if chosen.len() == n {
        emit(chosen);
        return;
    }
    for i in from..all.len() {
        chosen.push(all[i].clone());
        union_families(all, n, i + 1, chosen, emit);
        chosen.pop();
    }
}
