//! Depth-first search over colorings of the cells `1, 2, ..., max_cells`.
//!
//! After each assignment the problem's closure check is asked whether a
//! witness now lies entirely in the colored prefix; if so the branch is cut.
//! Every surviving prefix is therefore a bad coloring of its own length.
//! Colors follow first-occurrence canonical form (cell 1 gets color 0, a new
//! color is always the smallest unused index), and the DFS visits prefixes
//! in lexicographic order, so the first prefix of length `t` it reaches is
//! the lexicographically least bad coloring of `t` cells.
//!
//! One DFS therefore answers every level at once: it records the first
//! prefix reached at each depth and stops when it reaches `max_cells` or
//! runs out of tree.
//!
//! Work is split on the surviving prefixes of a fixed depth. Subtrees are
//! searched independently and merged by an in-order fold; each subtree
//! reports the node index at which it first reached each depth, so the fold
//! can replay the sequential budget exactly. Results and node counts do not
//! depend on the thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::bits::Bits;
use super::witness::{SpencerClosure, UnionClosure};

/// Depth of the work-splitting prefix.
pub(crate) const SPLIT_DEPTH: usize = 12;

pub(crate) enum Closure {
    Spencer(SpencerClosure),
    Union(UnionClosure),
}

impl Closure {
    #[inline]
    fn closes(&self, t: usize, assign: &[u8], masks: &[Bits]) -> bool {
        match self {
            Closure::Spencer(s) => s.closes(t, assign, masks),
            Closure::Union(u) => u.closes(t, assign),
        }
    }
}

/// Outcome of [`deepest_bad`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DeepResult {
    /// `first_bad[t]` is the lexicographically least bad coloring of `t`
    /// cells, for `t = 1..=depth` (`first_bad[0]` is empty).
    pub first_bad: Vec<Vec<u8>>,
    pub stop: Stop,
    /// Nodes visited; saturates at the cap when the budget ran out.
    pub nodes: u64,
}

impl DeepResult {
    pub fn depth(&self) -> usize {
        self.first_bad.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    /// The whole tree was explored; no bad coloring is longer than `depth`.
    Exhausted,
    /// A bad coloring of `max_cells` cells was reached.
    ReachedTarget,
    /// The node budget ran out.
    OutOfBudget,
}

/// First arrival at a new depth: (depth, node index, prefix).
type Reach = (usize, u64, Vec<u8>);

enum Flow {
    Target,
    Done,
    Abort,
}

struct Dfs<'a> {
    closure: &'a Closure,
    target: usize,
    colors: u8,
    assign: Vec<u8>,
    masks: Vec<Bits>,
    nodes: u64,
    cap: u64,
    best: usize,
    reaches: Vec<Reach>,
    /// (lowest subtree index that reached the target, own index)
    signal: Option<(&'a AtomicUsize, usize)>,
    /// Stop descending at this depth and collect (prefix, colors used).
    split: Option<(usize, Vec<(Vec<u8>, u8)>)>,
}

impl<'a> Dfs<'a> {
    fn new(closure: &'a Closure, target: usize, colors: u8, cap: u64) -> Self {
        Dfs {
            closure,
            target,
            colors,
            assign: vec![0; target],
            masks: vec![Bits::default(); colors as usize],
            nodes: 0,
            cap,
            best: 0,
            reaches: Vec::new(),
            signal: None,
            split: None,
        }
    }

    fn load_prefix(&mut self, prefix: &[u8]) {
        for (i, &c) in prefix.iter().enumerate() {
            self.assign[i] = c;
            self.masks[c as usize].set(i + 1);
        }
        self.best = prefix.len();
    }

    /// Cells `1..t` are colored and form a bad prefix.
    fn run(&mut self, t: usize, used: u8) -> Flow {
        let depth = t - 1;
        if depth > self.best {
            self.best = depth;
            self.reaches.push((depth, self.nodes, self.assign[..depth].to_vec()));
        }
        if depth == self.target {
            return Flow::Target;
        }
        if let Some((split_at, out)) = &mut self.split {
            if depth == *split_at {
                out.push((self.assign[..depth].to_vec(), used));
                return Flow::Done;
            }
        }
        let top = used.min(self.colors - 1);
        for col in 0..=top {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Flow::Abort;
            }
            if self.nodes & 0x3ff == 0 {
                if let Some((flag, me)) = self.signal {
                    if flag.load(Ordering::Relaxed) < me {
                        return Flow::Abort;
                    }
                }
            }
            self.assign[t - 1] = col;
            self.masks[col as usize].set(t);
            let cut = self.closure.closes(t, &self.assign, &self.masks);
            if !cut {
                match self.run(t + 1, used.max(col + 1)) {
                    Flow::Done => {}
                    flow => return flow,
                }
            }
            self.masks[col as usize].clear(t);
        }
        Flow::Done
    }
}

enum Sub {
    /// Subtree finished (explored or reached target) within its cap.
    Finished { reaches: Vec<Reach>, nodes: u64, target: bool },
    /// Cap exceeded; reaches recorded before the cap are kept.
    OverBudget { reaches: Vec<Reach> },
    /// Abandoned because an earlier subtree reached the target.
    Skipped,
}

fn run_subtree(
    closure: &Closure,
    target: usize,
    colors: u8,
    prefix: &[u8],
    used: u8,
    cap: u64,
    signal: Option<(&AtomicUsize, usize)>,
) -> Sub {
    let mut dfs = Dfs::new(closure, target, colors, cap);
    dfs.signal = signal;
    dfs.load_prefix(prefix);
    match dfs.run(prefix.len() + 1, used) {
        Flow::Target => Sub::Finished { reaches: dfs.reaches, nodes: dfs.nodes, target: true },
        Flow::Done => Sub::Finished { reaches: dfs.reaches, nodes: dfs.nodes, target: false },
        Flow::Abort if dfs.nodes > cap => Sub::OverBudget { reaches: dfs.reaches },
        Flow::Abort => Sub::Skipped,
    }
}

/// Explores bad colorings of up to `max_cells` cells with at most `colors`
/// colors, visiting at most `cap` nodes (one node per color assignment).
pub(crate) fn deepest_bad(closure: &Closure, max_cells: usize, colors: u8, cap: u64, threads: usize) -> DeepResult {
    assert!(colors >= 1);
    let mut first_bad: Vec<Vec<u8>> = vec![Vec::new()];
    let absorb = |reaches: Vec<Reach>, budget: u64, first_bad: &mut Vec<Vec<u8>>| {
        for (depth, at, prefix) in reaches {
            if at <= budget && depth == first_bad.len() {
                first_bad.push(prefix);
            }
        }
    };

    let mut head = Dfs::new(closure, max_cells, colors, cap);
    head.split = Some((SPLIT_DEPTH, Vec::new()));
    let head_flow = head.run(1, 0);
    let head_nodes = head.nodes;
    let prefixes = head.split.take().map(|(_, p)| p).unwrap_or_default();
    absorb(std::mem::take(&mut head.reaches), cap, &mut first_bad);
    match head_flow {
        Flow::Abort => return DeepResult { first_bad, stop: Stop::OutOfBudget, nodes: cap },
        Flow::Target => return DeepResult { first_bad, stop: Stop::ReachedTarget, nodes: head_nodes },
        Flow::Done => {}
    }
    let remaining = cap - head_nodes;

    let results: Vec<Sub> = if threads <= 1 {
        let mut out = Vec::new();
        let mut left = remaining;
        for (prefix, used) in &prefixes {
            let r = run_subtree(closure, max_cells, colors, prefix, *used, left, None);
            let stop = match &r {
                Sub::Finished { nodes, target, .. } => {
                    left -= nodes;
                    *target
                }
                Sub::OverBudget { .. } | Sub::Skipped => true,
            };
            out.push(r);
            if stop {
                break;
            }
        }
        out
    } else {
        use rayon::prelude::*;
        let first_target = AtomicUsize::new(usize::MAX);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            prefixes
                .par_iter()
                .enumerate()
                .map(|(i, (prefix, used))| {
                    if first_target.load(Ordering::Relaxed) < i {
                        return Sub::Skipped;
                    }
                    let r = run_subtree(closure, max_cells, colors, prefix, *used, remaining, Some((&first_target, i)));
                    if let Sub::Finished { target: true, .. } = r {
                        first_target.fetch_min(i, Ordering::Relaxed);
                    }
                    r
                })
                .collect()
        })
    };

    let mut spent = head_nodes;
    for r in results {
        let budget = cap - spent;
        match r {
            Sub::Finished { reaches, nodes, target } => {
                absorb(reaches, budget, &mut first_bad);
                if nodes > budget {
                    return DeepResult { first_bad, stop: Stop::OutOfBudget, nodes: cap };
                }
                spent += nodes;
                if target {
                    return DeepResult { first_bad, stop: Stop::ReachedTarget, nodes: spent };
                }
            }
            Sub::OverBudget { reaches } => {
                absorb(reaches, budget, &mut first_bad);
                return DeepResult { first_bad, stop: Stop::OutOfBudget, nodes: cap };
            }
            Sub::Skipped => unreachable!("subtree skipped before the first one reaching the target"),
        }
    }
    DeepResult { first_bad, stop: Stop::Exhausted, nodes: spent }
}
