//! The lattice `NC(n)` of non-crossing partitions.
//!
//! A [`Partition`] is kept in canonical form: each block sorted, blocks
//! ordered by their minimum. Equality and hashing are structural on that
//! form, so partitions can key memo tables directly.
//!
//! The order is reverse refinement: `σ ≤ π` when every block of `σ` sits
//! inside a block of `π`. `0ₙ` (all singletons) is the bottom and `1ₙ`
//! (one block) the top.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::enumerate::{AnyBlock, Interval, NcSearch};
use crate::{Error, Result};

pub const DEFAULT_NC_CEILING: usize = 16;
pub const DEFAULT_PATTERN_CEILING: usize = 20;
pub const DEFAULT_STAR_PAIRING_CEILING: usize = 24;
pub const DEFAULT_MULTICHAIN_CEILING: usize = 12;

/// Enumeration ceilings, checked before any enumeration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Largest `n` for `NC(n)` streams and Möbius intervals.
    pub nc: usize,
    /// Largest word length `2nm` for pattern-constrained families.
    pub pattern: usize,
    /// Largest word length `2nm` for ∗-pairings, whose count stays small.
    pub star_pairing: usize,
    /// Largest ground set `m` for multichains in `NC(m)`.
    pub multichain: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            nc: DEFAULT_NC_CEILING,
            pattern: DEFAULT_PATTERN_CEILING,
            star_pairing: DEFAULT_STAR_PAIRING_CEILING,
            multichain: DEFAULT_MULTICHAIN_CEILING,
        }
    }
}

impl Limits {
    pub const ENV_VAR: &'static str = "FREEHAAG_CEILING";

    /// Defaults, with `FREEHAAG_CEILING` (if set) replacing the `NC(n)`,
    /// pattern and ∗-pairing ceilings.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var(Self::ENV_VAR) {
            let c: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{} must be an integer, got {v:?}", Self::ENV_VAR)))?;
            limits.nc = c;
            limits.pattern = c;
            limits.star_pairing = c;
        }
        Ok(limits)
    }

    pub(crate) fn check(what: &'static str, value: usize, ceiling: usize) -> Result<()> {
        if value > ceiling {
            Err(Error::Size {
                what,
                value,
                ceiling,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    size: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition of `{1..n}` from blocks in any order.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("ground size must be positive"));
        }
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::arg("empty block"));
            }
            for &e in b {
                if e == 0 || e > n {
                    return Err(Error::arg(format!("element {e} outside 1..{n}")));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(Error::arg(format!("element {e} appears twice")));
                }
            }
        }
        if let Some(missing) = (1..=n).find(|&e| !seen[e]) {
            return Err(Error::arg(format!("element {missing} is not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { size: n, blocks })
    }

    /// Blocks already sorted and ordered by minimum.
    pub(crate) fn from_canonical(size: usize, blocks: Vec<Vec<usize>>) -> Self {
        debug_assert!(blocks.windows(2).all(|w| w[0][0] < w[1][0]));
        Partition { size, blocks }
    }

    /// `0ₙ`: all singletons.
    pub fn bottom(n: usize) -> Self {
        Partition::from_canonical(n, (1..=n).map(|e| vec![e]).collect())
    }

    /// `1ₙ`: a single block.
    pub fn top(n: usize) -> Self {
        Partition::from_canonical(n, vec![(1..=n).collect()])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of each element `1..=n`, in order.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.size];
        for (i, b) in self.blocks.iter().enumerate() {
            for &e in b {
                labels[e - 1] = i;
            }
        }
        labels
    }

    pub fn same_block(&self, p: usize, q: usize) -> bool {
        self.blocks.iter().any(|b| b.contains(&p) && b.contains(&q))
    }

    pub fn is_noncrossing(&self) -> bool {
        is_noncrossing(self)
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }
}

impl fmt::Display for Partition {
    /// Text form `{1,4|2,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("partition must be wrapped in braces: {s:?}")))?;
        let blocks = inner
            .split('|')
            .map(|b| {
                b.split(',')
                    .map(|e| {
                        e.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad element {e:?} in {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::new(n, blocks)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(d)?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::new(n, blocks).map_err(serde::de::Error::custom)
    }
}

/// A partition all of whose blocks have two elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pairing(Partition);

impl Pairing {
    pub fn new(p: Partition) -> Result<Self> {
        if !p.is_pairing() {
            return Err(Error::arg(format!("{p} is not a pair partition")));
        }
        Ok(Pairing(p))
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Pairing::new(Partition::new(
            n,
            pairs.iter().map(|&(a, b)| vec![a, b]).collect(),
        )?)
    }

    pub fn partition(&self) -> &Partition {
        &self.0
    }

    pub fn into_partition(self) -> Partition {
        self.0
    }

    /// The partner of each position, `partner[p-1]`.
    pub fn partners(&self) -> Vec<usize> {
        let mut partner = vec![0; self.0.size];
        for b in &self.0.blocks {
            partner[b[0] - 1] = b[1];
            partner[b[1] - 1] = b[0];
        }
        partner
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.blocks.iter().map(|b| (b[0], b[1]))
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// True iff there are no `p < q < p' < q'` with `p ~ p'`, `q ~ q'`, `p ≁ q`.
pub fn is_noncrossing(p: &Partition) -> bool {
    let labels = p.labels();
    // Between consecutive members a < b of a block, every element must
    // belong to a block lying entirely inside (a, b).
    for block in &p.blocks {
        for w in block.windows(2) {
            let (a, b) = (w[0], w[1]);
            for e in a + 1..b {
                let inner = &p.blocks[labels[e - 1]];
                if inner[0] < a || *inner.last().unwrap() > b {
                    return false;
                }
            }
        }
    }
    true
}

/// Streams `NC(n)` in the fixed lexicographic block-choice order.
pub struct NcIter(NcSearch<AnyBlock>);

impl Iterator for NcIter {
    type Item = Partition;
    fn next(&mut self) -> Option<Partition> {
        self.0.next()
    }
}

pub fn enumerate_nc(n: usize, limits: &Limits) -> Result<NcIter> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    Limits::check("n", n, limits.nc)?;
    Ok(NcIter(NcSearch::new(n, AnyBlock)))
}

/// `C_n = binom(2n, n-1) / n`, with `C_0 = 1`.
pub fn catalan(n: u64) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    binomial(BigInt::from(2 * n), BigInt::from(n - 1)) / BigInt::from(n)
}

/// `C^{(n)}_m = binom(m(n+1), m-1) / m`: multichains of length `n` in `NC(m)`.
pub fn fuss_catalan(n: u64, m: u64) -> BigInt {
    assert!(n >= 1 && m >= 1, "fuss_catalan needs n, m >= 1");
    binomial(BigInt::from(m * (n + 1)), BigInt::from(m - 1)) / BigInt::from(m)
}

fn same_size(a: &Partition, b: &Partition) -> Result<()> {
    if a.size != b.size {
        return Err(Error::arg(format!(
            "ground sizes differ: {} vs {}",
            a.size, b.size
        )));
    }
    Ok(())
}

/// Reverse refinement: every block of `sigma` lies inside a block of `pi`.
pub fn leq(sigma: &Partition, pi: &Partition) -> Result<bool> {
    same_size(sigma, pi)?;
    Ok(leq_unchecked(sigma, &pi.labels()))
}

fn leq_unchecked(sigma: &Partition, pi_labels: &[usize]) -> bool {
    sigma.blocks.iter().all(|b| {
        let l = pi_labels[b[0] - 1];
        b.iter().all(|&e| pi_labels[e - 1] == l)
    })
}

/// Streams the interval `[lower, upper]` of `NC(n)`.
pub(crate) fn interval(lower: &Partition, upper: &Partition) -> NcSearch<Interval> {
    NcSearch::new(lower.size, Interval::new(lower, upper))
}

/// Memo table for the Möbius function of `NC(n)`, computed by the defining
/// recursion `μ(σ,π) = −Σ_{σ≤τ<π} μ(σ,τ)`.
///
/// One cache per thread; results do not depend on which cache computed them.
#[derive(Debug, Default, Clone)]
pub struct MobiusCache {
    memo: HashMap<(Partition, Partition), BigInt>,
    limits: Limits,
}

impl MobiusCache {
    pub fn new(limits: Limits) -> Self {
        MobiusCache {
            memo: HashMap::new(),
            limits,
        }
    }

    fn check_pair(&self, sigma: &Partition, pi: &Partition) -> Result<()> {
        same_size(sigma, pi)?;
        Limits::check("n", sigma.size, self.limits.nc)?;
        if !sigma.is_noncrossing() || !pi.is_noncrossing() {
            return Err(Error::arg("Möbius arguments must be non-crossing"));
        }
        if !leq_unchecked(sigma, &pi.labels()) {
            return Err(Error::arg(format!("{sigma} is not below {pi}")));
        }
        Ok(())
    }

    pub fn mobius(&mut self, sigma: &Partition, pi: &Partition) -> Result<BigInt> {
        self.check_pair(sigma, pi)?;
        let key = (sigma.clone(), pi.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        // Finer partitions first, so every τ' < τ is settled before τ.
        let mut members: Vec<Partition> = interval(sigma, pi).collect();
        members.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
        let labels: Vec<Vec<usize>> = members.iter().map(Partition::labels).collect();
        let mut values: Vec<BigInt> = Vec::with_capacity(members.len());
        for (i, tau) in members.iter().enumerate() {
            let v = if tau == sigma {
                BigInt::one()
            } else {
                let s: BigInt = (0..i)
                    .filter(|&j| leq_unchecked(&members[j], &labels[i]))
                    .map(|j| &values[j])
                    .sum();
                -s
            };
            values.push(v);
        }
        for (tau, v) in members.into_iter().zip(values) {
            self.memo.insert((sigma.clone(), tau), v);
        }
        Ok(self.memo[&key].clone())
    }

    /// `μ(σ, π)` for every `σ ≤ π` at once, by the dual recursion
    /// `μ(σ,π) = −Σ_{σ<τ≤π} μ(τ,π)`.
    pub fn mobius_to(&mut self, pi: &Partition) -> Result<Vec<(Partition, BigInt)>> {
        let bottom = Partition::bottom(pi.size);
        self.check_pair(&bottom, pi)?;
        let mut members: Vec<Partition> = interval(&bottom, pi).collect();
        members.sort_by(|a, b| a.num_blocks().cmp(&b.num_blocks()).then_with(|| a.cmp(b)));
        let labels: Vec<Vec<usize>> = members.iter().map(Partition::labels).collect();
        let mut values: Vec<BigInt> = Vec::with_capacity(members.len());
        for (i, sigma) in members.iter().enumerate() {
            let v = if sigma == pi {
                BigInt::one()
            } else {
                let s: BigInt = (0..i)
                    .filter(|&j| leq_unchecked(sigma, &labels[j]))
                    .map(|j| &values[j])
                    .sum();
                -s
            };
            values.push(v);
        }
        for (sigma, v) in members.iter().zip(&values) {
            self.memo.insert((sigma.clone(), pi.clone()), v.clone());
        }
        Ok(members.into_iter().zip(values).collect())
    }
}

/// Möbius function by the defining recursion, with a fresh memo table.
pub fn mobius(sigma: &Partition, pi: &Partition) -> Result<BigInt> {
    MobiusCache::default().mobius(sigma, pi)
}

/// Block sizes of the Kreweras complement of a non-crossing partition,
/// read off the cycles of `σ⁻¹ γ` with `γ = (1 2 … n)`.
pub(crate) fn kreweras_block_sizes(sigma: &Partition) -> Vec<usize> {
    let n = sigma.size;
    // prev[e] = σ⁻¹(e): the previous element of e's block, cyclically
    let mut prev = vec![0; n + 1];
    for b in &sigma.blocks {
        for (i, &e) in b.iter().enumerate() {
            prev[e] = if i == 0 { *b.last().unwrap() } else { b[i - 1] };
        }
    }
    let mut seen = vec![false; n + 1];
    let mut sizes = Vec::new();
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut e = start;
        while !seen[e] {
            seen[e] = true;
            len += 1;
            e = prev[e % n + 1];
        }
        sizes.push(len);
    }
    sizes
}

/// `μ(σ, π)` through interval factorisation: the interval `[σ, π]` splits as
/// a product over blocks of `π`, and `μ(σ, 1ₖ)` is the product of
/// `(−1)^{s−1} C_{s−1}` over Kreweras-complement block sizes `s`.
///
/// Fast path for cumulant extraction; tested against [`mobius`].
pub fn mobius_factorized(sigma: &Partition, pi: &Partition) -> Result<BigInt> {
    same_size(sigma, pi)?;
    let pi_labels = pi.labels();
    if !leq_unchecked(sigma, &pi_labels) {
        return Err(Error::arg(format!("{sigma} is not below {pi}")));
    }
    let mut acc = BigInt::one();
    for w in &pi.blocks {
        let mut rank = vec![0; sigma.size + 1];
        for (i, &e) in w.iter().enumerate() {
            rank[e] = i + 1;
        }
        let restricted: Vec<Vec<usize>> = sigma
            .blocks
            .iter()
            .filter(|b| pi_labels[b[0] - 1] == pi_labels[w[0] - 1])
            .map(|b| b.iter().map(|&e| rank[e]).collect())
            .collect();
        let local = Partition::from_canonical(w.len(), restricted);
        for s in kreweras_block_sizes(&local) {
            let c = catalan(s as u64 - 1);
            if s % 2 == 0 {
                acc = -acc * c;
            } else {
                acc *= c;
            }
        }
    }
    Ok(acc)
}

/// A weakly increasing chain `Φ₁ ≤ … ≤ Φₙ` in `NC(m)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Multichain {
    chain: Vec<Partition>,
}

impl Multichain {
    pub fn new(chain: Vec<Partition>) -> Result<Self> {
        let first = chain
            .first()
            .ok_or_else(|| Error::arg("multichain must be non-empty"))?;
        for p in &chain {
            same_size(first, p)?;
            if !p.is_noncrossing() {
                return Err(Error::arg(format!("{p} is crossing")));
            }
        }
        for w in chain.windows(2) {
            if !leq_unchecked(&w[0], &w[1].labels()) {
                return Err(Error::arg(format!("chain not monotone: {} ≰ {}", w[0], w[1])));
            }
        }
        Ok(Multichain { chain })
    }

    /// Chain length `n`.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ground size `m`.
    pub fn ground_size(&self) -> usize {
        self.chain[0].size
    }

    /// `Φⱼ` for `j` in `1..=n`.
    pub fn get(&self, j: usize) -> &Partition {
        &self.chain[j - 1]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.chain
    }

    pub fn text_forms(&self) -> Vec<String> {
        self.chain.iter().map(Partition::to_string).collect()
    }
}

impl fmt::Display for Multichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.chain.iter().enumerate() {
            if i > 0 {
                f.write_str(" <= ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Streams length-`n` multichains in `NC(m)`, lexicographic in the
/// enumeration order of `NC(m)`. Position `i` runs over the interval
/// `[Φ_{i−1}, 1ₘ]`.
pub struct MultichainIter {
    m: usize,
    n: usize,
    searches: Vec<NcSearch<Interval>>,
    chain: Vec<Partition>,
    done: bool,
}

impl MultichainIter {
    fn open(&self) -> NcSearch<Interval> {
        let lower = self
            .chain
            .last()
            .cloned()
            .unwrap_or_else(|| Partition::bottom(self.m));
        interval(&lower, &Partition::top(self.m))
    }
}

impl Iterator for MultichainIter {
    type Item = Multichain;

    fn next(&mut self) -> Option<Multichain> {
        if self.done {
            return None;
        }
        // drop the last choice (if any), then refill to length n
        self.chain.pop();
        loop {
            if self.searches.len() > self.chain.len() {
                let top = self.searches.len() - 1;
                match self.searches[top].next() {
                    Some(p) => self.chain.push(p),
                    None => {
                        self.searches.pop();
                        if self.chain.pop().is_none() {
                            self.done = true;
                            return None;
                        }
                        continue;
                    }
                }
            }
            if self.chain.len() == self.n {
                return Some(Multichain {
                    chain: self.chain.clone(),
                });
            }
            let s = self.open();
            self.searches.push(s);
        }
    }
}

pub fn enumerate_multichains(n: usize, m: usize, limits: &Limits) -> Result<MultichainIter> {
    if n == 0 || m == 0 {
        return Err(Error::arg("n and m must be positive"));
    }
    Limits::check("m", m, limits.multichain)?;
    let mut it = MultichainIter {
        m,
        n,
        searches: Vec::new(),
        chain: Vec::new(),
        done: false,
    };
    it.searches.push(it.open());
    Ok(it)
}

/// Number of elements yielded by an enumeration, as a big integer.
pub fn count<I: Iterator>(it: I) -> BigInt {
    BigInt::from(it.count())
}
