//! The bijection `𝒫: NC₂*(n,m) → NC⁽ⁿ⁾(m)` and its inverse `𝒬`.
//!
//! A ∗-pairing only ever joins `c(k, j)` to some `c*(k', j)` with the same
//! label `j`. Joining every `c(k, j)` to its own `c*(k, j)` as well turns the
//! label-`j` letters into disjoint cycles; the groups met by one cycle form a
//! block of `Φⱼ`. `𝒬` rebuilds the cycles from the blocks.

use std::collections::BTreeSet;

use crate::partitions::{Multichain, Pairing, Partition};
use crate::patterns::{PatternWord, StarPairing};
use crate::{Error, Result};

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Blocks over `1..=n`.
    fn into_partition(mut self) -> Partition {
        let n = self.0.len();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            blocks[r].push(x + 1);
        }
        let blocks = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        Partition::new(n, blocks).expect("union-find classes partition the ground set")
    }
}

/// `𝒫(π) = (Φ₁, …, Φₙ)`.
pub fn phi_map(pi: &StarPairing) -> Result<Multichain> {
    let word = pi.word();
    let (n, m) = (word.n(), word.m());
    let mut finds: Vec<UnionFind> = (0..n).map(|_| UnionFind::new(m)).collect();
    for (a, b) in pi.pairing().pairs() {
        let (x, y) = (word.letter(a), word.letter(b));
        if x.label != y.label || x.star == y.star {
            return Err(Error::arg(format!(
                "pair ({a},{b}) is not of the form c(k,j) ~ c*(k',j)"
            )));
        }
        finds[x.label - 1].union(x.group - 1, y.group - 1);
    }
    let chain = finds.into_iter().map(UnionFind::into_partition).collect();
    Multichain::new(chain)
}

/// `𝒬(Φ₁, …, Φₙ)`: each block `{k₁ < … < k_r}` of `Φⱼ` contributes
/// `c(k₁,j) ~ c*(k_r,j)` and `c(k_{i+1},j) ~ c*(k_i,j)`.
pub fn q_map(chain: &Multichain) -> Result<StarPairing> {
    let (n, m) = (chain.len(), chain.ground_size());
    let word = PatternWord::new(n, m)?;
    let mut pairs = Vec::with_capacity(n * m);
    for j in 1..=n {
        for block in chain.get(j).blocks() {
            let r = block.len();
            pairs.push((word.c(block[0], j), word.c_star(block[r - 1], j)));
            for i in 1..r {
                pairs.push((word.c(block[i], j), word.c_star(block[i - 1], j)));
            }
        }
    }
    let pairing = Pairing::from_pairs(word.len(), &pairs)?;
    if cfg!(debug_assertions) {
        StarPairing::new(n, m, pairing)
    } else {
        Ok(StarPairing::new_unchecked(n, m, pairing))
    }
}

/// Groups `k'` that `k` reaches along the path that starts at `c(k, j)`
/// (or at `c*(k, j)` when `star`), alternating pairing edges with the
/// vertical links `c(k', j) ~ c*(k', j)`.
///
/// A path from `c(k, j)` counts only if its first step goes to a larger
/// group, one from `c*(k, j)` only if it goes to a smaller group. The groups
/// visited are checked to be strictly decreasing (resp. increasing).
pub fn connectedness(pi: &StarPairing, j: usize, k: usize, star: bool) -> Result<BTreeSet<usize>> {
    let word = pi.word();
    if j == 0 || j > word.n() || k == 0 || k > word.m() {
        return Err(Error::arg(format!("no address ({k},{j}) in pattern ({},{})", word.n(), word.m())));
    }
    let partner = pi.pairing().partners();
    let step = |group: usize| {
        let from = word.position(group, j, star);
        word.letter(partner[from - 1]).group
    };
    let mut reached = BTreeSet::new();
    let mut path = Vec::new();
    let mut x = step(k);
    let initial_ok = if star { x < k } else { x > k };
    if !initial_ok {
        return Ok(reached);
    }
    while x != k {
        path.push(x);
        reached.insert(x);
        x = step(x);
    }
    let monotone = path
        .windows(2)
        .all(|w| if star { w[0] < w[1] } else { w[0] > w[1] });
    assert!(
        monotone,
        "connecting path {path:?} from group {k} (label {j}, star {star}) is not monotone"
    );
    Ok(reached)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_multichains, Limits};
    use crate::patterns::enumerate_star_pairings;

    fn chain(parts: &[&str]) -> Multichain {
        Multichain::new(parts.iter().map(|s| s.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn one_group_maps_to_trivial_chain() {
        for n in 1..=4 {
            let pi = enumerate_star_pairings(n, 1, &Limits::default())
                .unwrap()
                .next()
                .unwrap();
            let phi = phi_map(&pi).unwrap();
            assert_eq!(phi.len(), n);
            assert!(phi.partitions().iter().all(|p| p.to_string() == "{1}"));
        }
    }

    #[test]
    fn nested_pairing_maps_to_bottom_chain() {
        let p = Pairing::from_pairs(8, &[(1, 4), (2, 3), (5, 8), (6, 7)]).unwrap();
        let pi = StarPairing::new(2, 2, p).unwrap();
        assert_eq!(phi_map(&pi).unwrap(), chain(&["{1|2}", "{1|2}"]));
    }

    #[test]
    fn inverse_examples() {
        let bottom = q_map(&chain(&["{1|2}", "{1|2}"])).unwrap();
        assert_eq!(bottom.partition().to_string(), "{1,4|2,3|5,8|6,7}");
        let mixed = q_map(&chain(&["{1|2}", "{1,2}"])).unwrap();
        assert_eq!(mixed.partition().to_string(), "{1,8|2,3|4,5|6,7}");
        let top = q_map(&chain(&["{1,2}", "{1,2}"])).unwrap();
        assert_eq!(top.partition().to_string(), "{1,8|2,7|3,6|4,5}");
    }

    #[test]
    fn round_trips_small() {
        let limits = Limits::default();
        for n in 1..=4 {
            for m in 1..=8 / n {
                let mut count = 0;
                for pi in enumerate_star_pairings(n, m, &limits).unwrap() {
                    assert_eq!(q_map(&phi_map(&pi).unwrap()).unwrap(), pi);
                    count += 1;
                }
                let mut chains = 0;
                for c in enumerate_multichains(n, m, &limits).unwrap() {
                    assert_eq!(phi_map(&q_map(&c).unwrap()).unwrap(), c);
                    chains += 1;
                }
                assert_eq!(count, chains);
            }
        }
    }

    #[test]
    fn connectedness_on_a_rainbow_is_empty() {
        let pi = enumerate_star_pairings(3, 1, &Limits::default())
            .unwrap()
            .next()
            .unwrap();
        for j in 1..=3 {
            assert!(connectedness(&pi, j, 1, false).unwrap().is_empty());
            assert!(connectedness(&pi, j, 1, true).unwrap().is_empty());
        }
    }

    #[test]
    fn connectedness_follows_block_cycles() {
        // Φ₁ = {1,3|2|4}, Φ₂ = {1,3,4|2}, Φ₃ = {1,2,3,4}
        let c = chain(&["{1,3|2|4}", "{1,3,4|2}", "{1,2,3,4}"]);
        let pi = q_map(&c).unwrap();
        let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        // the smallest group of a block reaches the rest along a decreasing path
        assert_eq!(connectedness(&pi, 3, 1, false).unwrap(), set(&[2, 3, 4]));
        assert_eq!(connectedness(&pi, 2, 1, false).unwrap(), set(&[3, 4]));
        assert_eq!(connectedness(&pi, 1, 1, false).unwrap(), set(&[3]));
        // the largest group reaches the rest along an increasing path from c*
        assert_eq!(connectedness(&pi, 2, 4, true).unwrap(), set(&[1, 3]));
        assert_eq!(connectedness(&pi, 3, 4, true).unwrap(), set(&[1, 2, 3]));
        // inner elements start in the wrong direction
        assert!(connectedness(&pi, 3, 2, false).unwrap().is_empty());
        assert!(connectedness(&pi, 3, 2, true).unwrap().is_empty());
        assert!(connectedness(&pi, 4, 1, false).is_err());
    }

    #[test]
    fn connectedness_generates_phi() {
        let limits = Limits::default();
        for (n, m) in [(1, 4), (2, 3), (3, 2), (2, 4), (3, 3)] {
            for pi in enumerate_star_pairings(n, m, &limits).unwrap() {
                let phi = phi_map(&pi).unwrap();
                for j in 1..=n {
                    let mut uf = UnionFind::new(m);
                    for k in 1..=m {
                        for star in [false, true] {
                            for k2 in connectedness(&pi, j, k, star).unwrap() {
                                uf.union(k - 1, k2 - 1);
                            }
                        }
                    }
                    assert_eq!(&uf.into_partition(), phi.get(j));
                }
            }
        }
    }
}
