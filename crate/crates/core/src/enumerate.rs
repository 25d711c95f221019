//! Backtracking engine shared by every non-crossing enumeration.
//!
//! The search always opens a block at the smallest unassigned position `u`.
//! Positions before `u` are assigned, so the new block may only use
//! positions in `(u, limit)`, where `limit` is the first assigned position
//! after `u`. Any block drawn from that window is non-crossing with every
//! earlier block, and later blocks are confined the same way, so crossing
//! never has to be tested explicitly. Candidate blocks are tried in
//! lexicographic order of their sorted element lists.

use crate::partitions::Partition;

pub(crate) trait BlockRule {
    /// Whether `next` may be appended to the (non-empty, sorted) partial block.
    fn can_follow(&self, block: &[usize], next: usize, limit: usize) -> bool;

    /// Whether the partial block is acceptable as a finished block.
    fn can_close(&self, block: &[usize], limit: usize) -> bool;

    fn max_block(&self) -> usize {
        usize::MAX
    }
}

#[derive(Debug, Clone)]
struct Frame {
    limit: usize,
    elems: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

/// Streams every non-crossing partition of `{1..n}` whose blocks satisfy `R`.
#[derive(Debug, Clone)]
pub(crate) struct NcSearch<R> {
    n: usize,
    rule: R,
    assigned: Vec<bool>,
    frames: Vec<Frame>,
    state: State,
}

impl<R: BlockRule> NcSearch<R> {
    pub(crate) fn new(n: usize, rule: R) -> Self {
        NcSearch {
            n,
            rule,
            assigned: vec![false; n + 2],
            frames: Vec::new(),
            state: State::Fresh,
        }
    }

    fn mark(&mut self, idx: usize, value: bool) {
        for &e in &self.frames[idx].elems {
            self.assigned[e] = value;
        }
    }

    /// Moves `frame` to its next closable candidate in preorder.
    fn next_closable(rule: &R, frame: &mut Frame) -> bool {
        loop {
            if !Self::next_prefix(rule, frame) {
                return false;
            }
            if rule.can_close(&frame.elems, frame.limit) {
                return true;
            }
        }
    }

    fn next_prefix(rule: &R, frame: &mut Frame) -> bool {
        let limit = frame.limit;
        let elems = &mut frame.elems;
        if elems.len() < rule.max_block() {
            let last = *elems.last().unwrap();
            if let Some(e) = (last + 1..limit).find(|&e| rule.can_follow(elems, e, limit)) {
                elems.push(e);
                return true;
            }
        }
        while elems.len() > 1 {
            let old = elems.pop().unwrap();
            if let Some(e) = (old + 1..limit).find(|&e| rule.can_follow(elems, e, limit)) {
                elems.push(e);
                return true;
            }
        }
        false
    }

    /// Opens blocks until every position is assigned; false on a dead end.
    fn fill(&mut self) -> bool {
        while let Some(u) = (1..=self.n).find(|&p| !self.assigned[p]) {
            let limit = (u + 1..=self.n)
                .find(|&p| self.assigned[p])
                .unwrap_or(self.n + 1);
            let mut frame = Frame {
                limit,
                elems: vec![u],
            };
            if !(self.rule.can_close(&frame.elems, limit)
                || Self::next_closable(&self.rule, &mut frame))
            {
                return false;
            }
            self.frames.push(frame);
            self.mark(self.frames.len() - 1, true);
        }
        true
    }

    fn advance(&mut self) -> bool {
        loop {
            let Some(top) = self.frames.len().checked_sub(1) else {
                return false;
            };
            self.mark(top, false);
            if Self::next_closable(&self.rule, &mut self.frames[top]) {
                self.mark(top, true);
                if self.fill() {
                    return true;
                }
            } else {
                self.frames.pop();
            }
        }
    }

    fn current(&self) -> Partition {
        let blocks = self.frames.iter().map(|f| f.elems.clone()).collect();
        Partition::from_canonical(self.n, blocks)
    }
}

impl<R: BlockRule> Iterator for NcSearch<R> {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let found = match self.state {
            State::Fresh => {
                self.state = State::Running;
                self.fill() || self.advance()
            }
            State::Running => self.advance(),
            State::Done => return None,
        };
        if found {
            Some(self.current())
        } else {
            self.state = State::Done;
            self.frames.clear();
            None
        }
    }
}

/// No constraint: all of `NC(n)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AnyBlock;

impl BlockRule for AnyBlock {
    fn can_follow(&self, _: &[usize], _: usize, _: usize) -> bool {
        true
    }
    fn can_close(&self, _: &[usize], _: usize) -> bool {
        true
    }
}

/// Pair partitions whose pairs satisfy a predicate on `(first, second)`.
#[derive(Clone)]
pub(crate) struct Pairs<F> {
    pub(crate) accept: F,
}

impl<F: Fn(usize, usize) -> bool> BlockRule for Pairs<F> {
    fn can_follow(&self, block: &[usize], next: usize, _: usize) -> bool {
        block.len() == 1 && (next - block[0]) % 2 == 1 && (self.accept)(block[0], next)
    }
    fn can_close(&self, block: &[usize], _: usize) -> bool {
        block.len() == 2
    }
    fn max_block(&self) -> usize {
        2
    }
}

/// Blocks of even size, single colour, with star flags alternating in
/// position order. Every gap a block encloses must itself be balanced
/// (equal star and non-star counts per colour), since it will be covered by
/// blocks of the same kind.
#[derive(Debug, Clone)]
pub(crate) struct Alternating {
    flags: Vec<bool>,
    colors: Vec<usize>,
    /// balance[c][p] = (#non-star − #star) of colour c among positions 1..=p
    balance: Vec<Vec<i32>>,
}

impl Alternating {
    /// `flags[p-1]`, `colors[p-1]` describe position `p`.
    pub(crate) fn new(flags: &[bool], colors: &[usize]) -> Self {
        assert_eq!(flags.len(), colors.len());
        let ncolors = colors.iter().copied().max().map_or(0, |c| c + 1);
        let mut balance = vec![vec![0i32; flags.len() + 1]; ncolors];
        for (c, row) in balance.iter_mut().enumerate() {
            for p in 1..=flags.len() {
                let step = if colors[p - 1] != c {
                    0
                } else if flags[p - 1] {
                    -1
                } else {
                    1
                };
                row[p] = row[p - 1] + step;
            }
        }
        let mut flags1 = vec![false];
        flags1.extend_from_slice(flags);
        let mut colors1 = vec![usize::MAX];
        colors1.extend_from_slice(colors);
        Alternating {
            flags: flags1,
            colors: colors1,
            balance,
        }
    }

    /// Positions strictly between `a` and `b` are balanced in every colour.
    fn gap_balanced(&self, a: usize, b: usize) -> bool {
        self.balance.iter().all(|row| row[b - 1] == row[a])
    }
}

impl BlockRule for Alternating {
    fn can_follow(&self, block: &[usize], next: usize, _: usize) -> bool {
        let last = *block.last().unwrap();
        self.colors[next] == self.colors[block[0]]
            && self.flags[next] != self.flags[last]
            && self.gap_balanced(last, next)
    }
    fn can_close(&self, block: &[usize], limit: usize) -> bool {
        block.len() % 2 == 0 && self.gap_balanced(*block.last().unwrap(), limit)
    }
}

/// Partitions `τ` with `lower ≤ τ ≤ upper`, given block labels per position.
#[derive(Debug, Clone)]
pub(crate) struct Interval {
    lower: Vec<usize>,
    lower_sizes: Vec<usize>,
    upper: Vec<usize>,
}

impl Interval {
    pub(crate) fn new(lower: &Partition, upper: &Partition) -> Self {
        let mut lo = vec![usize::MAX];
        lo.extend(lower.labels());
        let mut up = vec![usize::MAX];
        up.extend(upper.labels());
        Interval {
            lower: lo,
            lower_sizes: lower.blocks().iter().map(Vec::len).collect(),
            upper: up,
        }
    }
}

impl BlockRule for Interval {
    fn can_follow(&self, block: &[usize], next: usize, _: usize) -> bool {
        self.upper[next] == self.upper[block[0]]
    }
    fn can_close(&self, block: &[usize], _: usize) -> bool {
        // the block must be a union of whole lower blocks
        let mut seen: Vec<usize> = Vec::new();
        let mut covered = 0;
        for &e in block {
            let l = self.lower[e];
            if !seen.contains(&l) {
                seen.push(l);
                covered += self.lower_sizes[l];
            }
        }
        covered == block.len()
    }
}
