//! The alternating word `a_{n,m} = (aⁿ (a*)ⁿ)^m` and the partition families
//! constrained by it.
//!
//! Positions run over `1..=2nm` in `2m` groups of `n` letters. Group `ℓ` of
//! the non-star letters is followed by group `ℓ` of the star letters. Inside
//! a non-star group labels run `n, …, 1`; inside a star group `1, …, n`, so
//! that `c(ℓ, j)` and `c*(ℓ, j)` mirror each other around the group boundary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerate::{Alternating, NcSearch, Pairs};
use crate::partitions::{Limits, Pairing, Partition};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Letter {
    pub position: usize,
    /// `ℓ` in `1..=m`.
    pub group: usize,
    /// `j` in `1..=n`.
    pub label: usize,
    pub star: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternWord {
    n: usize,
    m: usize,
    letters: Vec<Letter>,
}

impl PatternWord {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::arg("pattern needs n, m >= 1"));
        }
        let letters = (1..=2 * n * m)
            .map(|position| {
                let g = (position - 1) / n;
                let o = (position - 1) % n;
                let star = g % 2 == 1;
                Letter {
                    position,
                    group: g / 2 + 1,
                    label: if star { o + 1 } else { n - o },
                    star,
                }
            })
            .collect();
        Ok(PatternWord { n, m, letters })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The letter at 1-based `position`.
    pub fn letter(&self, position: usize) -> &Letter {
        &self.letters[position - 1]
    }

    pub fn star_flags(&self) -> Vec<bool> {
        self.letters.iter().map(|l| l.star).collect()
    }

    /// `c(ℓ, j)`.
    pub fn c(&self, group: usize, label: usize) -> usize {
        2 * (group - 1) * self.n + (self.n - label) + 1
    }

    /// `c*(ℓ, j)`.
    pub fn c_star(&self, group: usize, label: usize) -> usize {
        (2 * (group - 1) + 1) * self.n + label
    }

    pub fn position(&self, group: usize, label: usize, star: bool) -> usize {
        if star {
            self.c_star(group, label)
        } else {
            self.c(group, label)
        }
    }

    /// Which of the `2m` groups of `n` letters a position lies in (0-based).
    pub fn block_of(&self, position: usize) -> usize {
        (position - 1) / self.n
    }

    fn check_size(&self, ceiling: usize) -> Result<()> {
        Limits::check("2nm", self.len(), ceiling)
    }
}

impl fmt::Display for PatternWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", if l.star { "a*" } else { "a" }, l.label)?;
        }
        Ok(())
    }
}

/// A non-crossing pairing of `a_{n,m}` joining every letter to a letter of
/// the opposite star flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarPairing {
    n: usize,
    m: usize,
    pairing: Pairing,
}

impl StarPairing {
    pub fn new(n: usize, m: usize, pairing: Pairing) -> Result<Self> {
        let word = PatternWord::new(n, m)?;
        let p = pairing.partition();
        if p.size() != word.len() {
            return Err(Error::arg(format!(
                "pairing has {} positions, pattern ({n},{m}) has {}",
                p.size(),
                word.len()
            )));
        }
        if !p.is_noncrossing() {
            return Err(Error::arg(format!("{p} is crossing")));
        }
        for (a, b) in pairing.pairs() {
            if word.letter(a).star == word.letter(b).star {
                return Err(Error::arg(format!(
                    "pair ({a},{b}) does not join a star letter to a non-star letter"
                )));
            }
        }
        Ok(StarPairing { n, m, pairing })
    }

    pub(crate) fn new_unchecked(n: usize, m: usize, pairing: Pairing) -> Self {
        StarPairing { n, m, pairing }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn partition(&self) -> &Partition {
        self.pairing.partition()
    }

    pub fn word(&self) -> PatternWord {
        PatternWord::new(self.n, self.m).expect("validated on construction")
    }
}

impl fmt::Display for StarPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}) {}", self.n, self.m, self.pairing)
    }
}

#[derive(Serialize, Deserialize)]
struct StarPairingRecord {
    n: usize,
    m: usize,
    pairing: String,
}

impl Serialize for StarPairing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StarPairingRecord {
            n: self.n,
            m: self.m,
            pairing: self.pairing.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StarPairing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StarPairingRecord::deserialize(d)?;
        let p: Partition = r.pairing.parse().map_err(D::Error::custom)?;
        let pairing = Pairing::new(p).map_err(D::Error::custom)?;
        StarPairing::new(r.n, r.m, pairing).map_err(D::Error::custom)
    }
}

type StarRule = Pairs<Box<dyn Fn(usize, usize) -> bool + Send>>;

/// Streams `NC₂*(n, m)`.
pub struct StarPairingIter {
    word: PatternWord,
    search: NcSearch<StarRule>,
}

impl Iterator for StarPairingIter {
    type Item = StarPairing;

    fn next(&mut self) -> Option<StarPairing> {
        let p = self.search.next()?;
        for b in p.blocks() {
            let (x, y) = (self.word.letter(b[0]), self.word.letter(b[1]));
            assert_eq!(
                x.label, y.label,
                "∗-pairing joined labels {} and {} at ({}, {})",
                x.label, y.label, b[0], b[1]
            );
        }
        let pairing = Pairing::new(p).expect("pair rule yields pairings");
        Some(StarPairing::new_unchecked(self.word.n, self.word.m, pairing))
    }
}

pub fn enumerate_star_pairings(n: usize, m: usize, limits: &Limits) -> Result<StarPairingIter> {
    let word = PatternWord::new(n, m)?;
    word.check_size(limits.star_pairing)?;
    let flags = word.star_flags();
    let accept: Box<dyn Fn(usize, usize) -> bool + Send> =
        Box::new(move |a, b| flags[a - 1] != flags[b - 1]);
    let search = NcSearch::new(word.len(), Pairs { accept });
    Ok(StarPairingIter { word, search })
}

/// Streams `NC*(n, m)`: non-crossing partitions of `a_{n,m}` whose blocks
/// have even size and alternate star flags in position order.
pub struct AlternatingIter(NcSearch<Alternating>);

impl Iterator for AlternatingIter {
    type Item = Partition;
    fn next(&mut self) -> Option<Partition> {
        self.0.next()
    }
}

pub fn enumerate_alternating_partitions(
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<AlternatingIter> {
    let word = PatternWord::new(n, m)?;
    word.check_size(limits.pattern)?;
    let flags = word.star_flags();
    let colors = vec![0; flags.len()];
    Ok(AlternatingIter(NcSearch::new(
        word.len(),
        Alternating::new(&flags, &colors),
    )))
}

type GroupRule = Pairs<Box<dyn Fn(usize, usize) -> bool + Send>>;

/// Streams `𝒯(n, m)`.
pub struct NoIntrablockIter(NcSearch<GroupRule>);

impl Iterator for NoIntrablockIter {
    type Item = Pairing;
    fn next(&mut self) -> Option<Pairing> {
        self.0
            .next()
            .map(|p| Pairing::new(p).expect("pair rule yields pairings"))
    }
}

/// Non-crossing pairings of `2nm` points in which no pair stays inside one of
/// the `2m` consecutive groups of `n`.
pub fn enumerate_no_intrablock_pairings(
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<NoIntrablockIter> {
    let word = PatternWord::new(n, m)?;
    word.check_size(limits.pattern)?;
    let accept: Box<dyn Fn(usize, usize) -> bool + Send> =
        Box::new(move |a, b| (a - 1) / n != (b - 1) / n);
    Ok(NoIntrablockIter(NcSearch::new(word.len(), Pairs { accept })))
}
