//! Moment/cumulant transforms for R-diagonal elements and free families of
//! them, and `2m`-norms of elements of the `n`-particle space.
//!
//! Blocks are read in increasing position order: a block's cumulant is
//! `α_k` when its first letter is `a` and `β_k` when it is `a*`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{Alternating, NcSearch};
use crate::exact::{self, norm_sqr, Complex, Rational};
use crate::partitions::{self, mobius_factorized, Limits, Partition};
use crate::patterns::{enumerate_alternating_partitions, PatternWord};
use crate::{Error, Result};

/// `(α_k, β_k)` for `k = 1..=K_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminingSequence {
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
}

impl DeterminingSequence {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::arg("determining sequence needs at least alpha_1"));
        }
        if alpha.len() != beta.len() {
            return Err(Error::arg(format!(
                "alpha has {} terms but beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        Ok(DeterminingSequence { alpha, beta })
    }

    /// `β = α`.
    pub fn tracial(alpha: Vec<Rational>) -> Result<Self> {
        let beta = alpha.clone();
        Self::new(alpha, beta)
    }

    /// Builds `α_k = β_k = f(k)` for `k = 1..=k_max`.
    pub fn from_fn(k_max: usize, f: impl Fn(usize) -> Rational) -> Result<Self> {
        Self::tracial((1..=k_max).map(f).collect())
    }

    pub fn k_max(&self) -> usize {
        self.alpha.len()
    }

    fn get<'a>(&self, v: &'a [Rational], k: usize) -> Result<&'a Rational> {
        if k == 0 {
            return Err(Error::arg("cumulant orders start at 1"));
        }
        v.get(k - 1).ok_or(Error::Truncation {
            order: k,
            k_max: self.k_max(),
        })
    }

    pub fn alpha(&self, k: usize) -> Result<&Rational> {
        self.get(&self.alpha, k)
    }

    pub fn beta(&self, k: usize) -> Result<&Rational> {
        self.get(&self.beta, k)
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn betas(&self) -> &[Rational] {
        &self.beta
    }

    pub fn is_tracial(&self) -> bool {
        self.alpha == self.beta
    }

    /// Whether every `α_k, β_k` up to `K_max` is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|x| !x.is_negative())
    }
}

/// Cumulant of one block, given its star flags in position order.
pub fn kappa_block(seq: &DeterminingSequence, flags: &[bool]) -> Result<Rational> {
    let len = flags.len();
    if len == 0 {
        return Err(Error::arg("empty block"));
    }
    if len > 2 * seq.k_max() {
        return Err(Error::Truncation {
            order: len.div_ceil(2),
            k_max: seq.k_max(),
        });
    }
    if len % 2 == 1 || flags.windows(2).any(|w| w[0] == w[1]) {
        return Ok(Rational::zero());
    }
    let k = len / 2;
    Ok(if flags[0] { seq.beta(k)? } else { seq.alpha(k)? }.clone())
}

fn block_flags(flags: &[bool], block: &[usize]) -> Vec<bool> {
    block.iter().map(|&p| flags[p - 1]).collect()
}

/// `κ_π`: product of block cumulants.
pub fn kappa_pi(seq: &DeterminingSequence, flags: &[bool], pi: &Partition) -> Result<Rational> {
    if pi.size() != flags.len() {
        return Err(Error::arg(format!(
            "partition of {} points applied to a word of length {}",
            pi.size(),
            flags.len()
        )));
    }
    let mut acc = Rational::one();
    for b in pi.blocks() {
        let k = kappa_block(seq, &block_flags(flags, b))?;
        if k.is_zero() {
            return Ok(k);
        }
        acc *= k;
    }
    Ok(acc)
}

/// The non-zero terms `(π, κ_π)` over `NC*(n, m)`.
pub fn alternating_terms(
    seq: &DeterminingSequence,
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<Vec<(Partition, Rational)>> {
    let flags = PatternWord::new(n, m)?.star_flags();
    let mut out = Vec::new();
    for pi in enumerate_alternating_partitions(n, m, limits)? {
        let k = kappa_pi(seq, &flags, &pi)?;
        if !k.is_zero() {
            out.push((pi, k));
        }
    }
    Ok(out)
}

/// `φ[(aⁿ (a*)ⁿ)^m] = Σ_{π∈NC*(n,m)} κ_π`.
pub fn moment_from_cumulants(
    seq: &DeterminingSequence,
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<Rational> {
    if n * m > seq.k_max() {
        return Err(Error::Truncation {
            order: n * m,
            k_max: seq.k_max(),
        });
    }
    Ok(alternating_terms(seq, n, m, limits)?
        .into_iter()
        .map(|(_, k)| k)
        .sum())
}

/// `Σ_{π∈NC*(n,m)} |κ_π|`.
pub fn abs_cumulant_sum(
    seq: &DeterminingSequence,
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<Rational> {
    if n * m > seq.k_max() {
        return Err(Error::Truncation {
            order: n * m,
            k_max: seq.k_max(),
        });
    }
    Ok(alternating_terms(seq, n, m, limits)?
        .into_iter()
        .map(|(_, k)| k.abs())
        .sum())
}

/// Moments of one element on words in `a` and `a*`.
pub trait MomentFunctional {
    fn moment(&self, flags: &[bool]) -> Result<Rational>;
}

/// Adapts a closure into a [`MomentFunctional`].
pub struct FnMoments<F>(pub F);

impl<F: Fn(&[bool]) -> Result<Rational>> MomentFunctional for FnMoments<F> {
    fn moment(&self, flags: &[bool]) -> Result<Rational> {
        (self.0)(flags)
    }
}

/// Star-word moments of an R-diagonal element, from its determining
/// sequence via the moment-cumulant formula.
pub struct SequenceMoments<'a> {
    pub seq: &'a DeterminingSequence,
    pub limits: Limits,
}

impl MomentFunctional for SequenceMoments<'_> {
    fn moment(&self, flags: &[bool]) -> Result<Rational> {
        let word: Vec<StarLetter> = flags
            .iter()
            .map(|&star| StarLetter { index: 0, star })
            .collect();
        mixed_moment(std::slice::from_ref(self.seq), &StarWord::new(word)?, &self.limits)
    }
}

/// Caches another functional's values by word.
pub struct Memoized<M> {
    inner: M,
    memo: Mutex<HashMap<Vec<bool>, Rational>>,
}

impl<M: MomentFunctional> Memoized<M> {
    pub fn new(inner: M) -> Self {
        Memoized {
            inner,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl<M: MomentFunctional> MomentFunctional for Memoized<M> {
    fn moment(&self, flags: &[bool]) -> Result<Rational> {
        if let Some(v) = self.memo.lock().unwrap().get(flags) {
            return Ok(v.clone());
        }
        let v = self.inner.moment(flags)?;
        self.memo
            .lock()
            .unwrap()
            .insert(flags.to_vec(), v.clone());
        Ok(v)
    }
}

/// `κ_π = Σ_{σ≤π} φ_σ μ(σ, π)`.
pub fn cumulants_from_moments(
    phi: &dyn MomentFunctional,
    flags: &[bool],
    pi: &Partition,
    limits: &Limits,
) -> Result<Rational> {
    if pi.size() != flags.len() {
        return Err(Error::arg("partition and word lengths differ"));
    }
    Limits::check("n", pi.size(), limits.nc)?;
    if !pi.is_noncrossing() {
        return Err(Error::arg(format!("{pi} is crossing")));
    }
    let memo = Memoized::new(phi);
    let bottom = Partition::bottom(pi.size());
    let mut total = Rational::zero();
    'sigma: for sigma in partitions::interval(&bottom, pi) {
        let mut phi_sigma = Rational::one();
        for b in sigma.blocks() {
            let v = memo.moment(&block_flags(flags, b))?;
            if v.is_zero() {
                continue 'sigma;
            }
            phi_sigma *= v;
        }
        let mu = mobius_factorized(&sigma, pi)?;
        total += phi_sigma * Rational::from_integer(mu);
    }
    Ok(total)
}

impl<M: MomentFunctional + ?Sized> MomentFunctional for &M {
    fn moment(&self, flags: &[bool]) -> Result<Rational> {
        (**self).moment(flags)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarLetter {
    pub index: usize,
    pub star: bool,
}

/// A word in the generators of a family and their adjoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarWord {
    letters: Vec<StarLetter>,
}

impl StarWord {
    pub fn new(letters: Vec<StarLetter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::arg("star word must be non-empty"));
        }
        Ok(StarWord { letters })
    }

    pub fn letters(&self) -> &[StarLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flags(&self) -> Vec<bool> {
        self.letters.iter().map(|l| l.star).collect()
    }

    /// Every word of length `len` over indices `0..alphabet`.
    pub fn all(len: usize, alphabet: usize) -> impl Iterator<Item = StarWord> {
        let base = 2 * alphabet;
        let total = base.pow(len as u32);
        (0..total).map(move |mut code| {
            let letters = (0..len)
                .map(|_| {
                    let d = code % base;
                    code /= base;
                    StarLetter {
                        index: d / 2,
                        star: d % 2 == 1,
                    }
                })
                .collect();
            StarWord { letters }
        })
    }
}

impl fmt::Display for StarWord {
    /// Letters are written `1`, `2*`, … with 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", l.index + 1, if l.star { "*" } else { "" })?;
        }
        Ok(())
    }
}

impl FromStr for StarWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (body, star) = match t.strip_suffix('*') {
                    Some(b) => (b, true),
                    None => (t, false),
                };
                let body = body.trim_start_matches(|c: char| c.is_alphabetic());
                let i: usize = body
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad letter {t:?} in star word")))?;
                if i == 0 {
                    return Err(Error::Parse("star word indices start at 1".into()));
                }
                Ok(StarLetter { index: i - 1, star })
            })
            .collect::<Result<Vec<_>>>()?;
        StarWord::new(letters)
    }
}

/// Moment of a word in a free family of R-diagonal elements; the element
/// with index `i` has determining sequence `family[i]`.
///
/// Sums over non-crossing partitions whose blocks each use one index, have
/// even size and alternate star flags.
pub fn mixed_moment(
    family: &[DeterminingSequence],
    w: &StarWord,
    limits: &Limits,
) -> Result<Rational> {
    Limits::check("word length", w.len(), limits.pattern)?;
    if let Some(l) = w.letters.iter().find(|l| l.index >= family.len()) {
        return Err(Error::arg(format!(
            "index {} has no determining sequence",
            l.index + 1
        )));
    }
    let flags = w.flags();
    let colors: Vec<usize> = w.letters.iter().map(|l| l.index).collect();
    // a quick necessary condition: each index has as many stars as non-stars
    let mut balance = vec![0i64; family.len()];
    for l in &w.letters {
        balance[l.index] += if l.star { -1 } else { 1 };
    }
    if balance.iter().any(|&b| b != 0) {
        return Ok(Rational::zero());
    }
    let mut total = Rational::zero();
    for pi in NcSearch::new(w.len(), Alternating::new(&flags, &colors)) {
        let mut term = Rational::one();
        for b in pi.blocks() {
            let k = kappa_block(&family[colors[b[0] - 1]], &block_flags(&flags, b))?;
            if k.is_zero() {
                term = k;
                break;
            }
            term *= k;
        }
        total += term;
    }
    Ok(total)
}

/// Coefficients of `T = Σ λ_w a_{w(1)} ⋯ a_{w(n)}` over words `w ∈ Iⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleTensor {
    n: usize,
    index_set: Vec<String>,
    /// words as 0-based index tuples
    coeffs: BTreeMap<Vec<usize>, Complex>,
}

#[derive(Serialize, Deserialize)]
struct CoeffRecord {
    word: Vec<String>,
    #[serde(with = "exact::ratio_str")]
    re: Rational,
    #[serde(with = "exact::ratio_str", default = "Rational::zero")]
    im: Rational,
}

#[derive(Serialize, Deserialize)]
struct TensorRecord {
    n: usize,
    index_set: Vec<String>,
    coeffs: Vec<CoeffRecord>,
}

impl ParticleTensor {
    pub fn new(n: usize, index_set: Vec<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("particle tensors need n >= 1"));
        }
        if index_set.is_empty() {
            return Err(Error::arg("index set must be non-empty"));
        }
        let mut sorted = index_set.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != index_set.len() {
            return Err(Error::arg("index set has repeated names"));
        }
        Ok(ParticleTensor {
            n,
            index_set,
            coeffs: BTreeMap::new(),
        })
    }

    /// Index names `"1"`, `"2"`, ….
    pub fn with_alphabet(n: usize, size: usize) -> Result<Self> {
        Self::new(n, (1..=size).map(|i| i.to_string()).collect())
    }

    /// Adds `λ` to the coefficient of the word (0-based indices).
    pub fn add(&mut self, word: &[usize], lambda: Complex) -> Result<()> {
        if word.len() != self.n {
            return Err(Error::arg(format!(
                "word of length {} in a {}-particle tensor",
                word.len(),
                self.n
            )));
        }
        if word.iter().any(|&i| i >= self.index_set.len()) {
            return Err(Error::arg("word index outside the index set"));
        }
        let entry = self
            .coeffs
            .entry(word.to_vec())
            .or_insert_with(|| Complex::new(Rational::zero(), Rational::zero()));
        *entry += lambda;
        if entry.re.is_zero() && entry.im.is_zero() {
            self.coeffs.remove(word);
        }
        Ok(())
    }

    pub fn add_real(&mut self, word: &[usize], lambda: Rational) -> Result<()> {
        self.add(word, Complex::new(lambda, Rational::zero()))
    }

    /// `a_{i₁} + … + a_{i_k}` style sums: every one-letter word with weight 1.
    pub fn sum_of_generators(k: usize) -> Result<Self> {
        let mut t = Self::with_alphabet(1, k)?;
        for i in 0..k {
            t.add_real(&[i], Rational::one())?;
        }
        Ok(t)
    }

    /// `λ·a_i a_i ⋯ a_i` (n letters).
    pub fn single_word(n: usize, lambda: Rational) -> Result<Self> {
        let mut t = Self::with_alphabet(n, 1)?;
        t.add_real(&vec![0; n], lambda)?;
        Ok(t)
    }

    /// Coefficients with real and imaginary parts `p/q`, `p ∈ -4..=4`,
    /// `q ∈ 1..=4`, on every word of `Iⁿ`.
    pub fn random<R: Rng>(n: usize, alphabet: usize, rng: &mut R) -> Result<Self> {
        let mut t = Self::with_alphabet(n, alphabet)?;
        let small = |rng: &mut R| exact::rat(rng.gen_range(-4..=4), rng.gen_range(1..=4));
        for code in 0..alphabet.pow(n as u32) {
            let word: Vec<usize> = (0..n)
                .map(|i| code / alphabet.pow(i as u32) % alphabet)
                .collect();
            let re = small(rng);
            let im = if rng.gen_bool(0.5) {
                small(rng)
            } else {
                Rational::zero()
            };
            t.add(&word, Complex::new(re, im))?;
        }
        Ok(t)
    }

    /// `count` seeded random tensors with `n` drawn from `1..=n_max` and an
    /// alphabet of size at most 3 with `|I|ⁿ ≤ 9`.
    pub fn corpus(seed: u64, count: usize, n_max: usize) -> Result<Vec<Self>> {
        if n_max == 0 {
            return Err(Error::arg("n_max must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let n = rng.gen_range(1..=n_max);
                let widest = (1..=3usize).rev().find(|s| s.pow(n as u32) <= 9).unwrap_or(1);
                let alphabet = rng.gen_range(1..=widest);
                Self::random(n, alphabet, &mut rng)
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index_set(&self) -> &[String] {
        &self.index_set
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&[usize], &Complex)> {
        self.coeffs.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ |λ_w|²`.
    pub fn coeff_norm_sq(&self) -> Rational {
        self.coeffs.values().map(norm_sqr).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: TensorRecord = serde_json::from_str(text)?;
        let mut t = Self::new(rec.n, rec.index_set)?;
        let lookup: HashMap<&str, usize> = t
            .index_set
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut words = Vec::new();
        for c in &rec.coeffs {
            let word = c
                .word
                .iter()
                .map(|s| {
                    lookup
                        .get(s.as_str())
                        .copied()
                        .ok_or_else(|| Error::Parse(format!("index {s:?} not in index_set")))
                })
                .collect::<Result<Vec<_>>>()?;
            words.push((word, Complex::new(c.re.clone(), c.im.clone())));
        }
        for (w, c) in words {
            t.add(&w, c)?;
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        let rec = TensorRecord {
            n: self.n,
            index_set: self.index_set.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, c)| CoeffRecord {
                    word: w.iter().map(|&i| self.index_set[i].clone()).collect(),
                    re: c.re.clone(),
                    im: c.im.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&rec).expect("tensor records serialize")
    }
}

/// The letters of one word laid into a group of the pattern, with the
/// coefficient it contributes.
struct GroupChoice {
    indices: Vec<usize>,
    weight: Complex,
}

/// `S(π, T)`: sum over index assignments constant on the blocks of `π` of
/// the product of coefficients read off the `2m` groups. Non-star groups
/// read a word of `T` left to right with `λ`, star groups read it right to
/// left with `conj λ`.
fn contraction(pi: &Partition, n: usize, m: usize, plain: &[GroupChoice], starred: &[GroupChoice]) -> Complex {
    let labels = pi.labels();
    let mut assigned: Vec<Option<usize>> = vec![None; pi.num_blocks()];
    let zero = Complex::new(Rational::zero(), Rational::zero());

    fn go(
        g: usize,
        groups: usize,
        n: usize,
        labels: &[usize],
        assigned: &mut Vec<Option<usize>>,
        plain: &[GroupChoice],
        starred: &[GroupChoice],
        acc: &Complex,
        total: &mut Complex,
    ) {
        if g == groups {
            *total += acc;
            return;
        }
        let choices = if g % 2 == 0 { plain } else { starred };
        let base = g * n;
        'choice: for c in choices {
            let mut newly = Vec::new();
            for (o, &i) in c.indices.iter().enumerate() {
                let b = labels[base + o];
                match assigned[b] {
                    Some(x) if x != i => {
                        for &u in &newly {
                            assigned[u] = None;
                        }
                        continue 'choice;
                    }
                    Some(_) => {}
                    None => {
                        assigned[b] = Some(i);
                        newly.push(b);
                    }
                }
            }
            let next = acc * &c.weight;
            go(g + 1, groups, n, labels, assigned, plain, starred, &next, total);
            for &u in &newly {
                assigned[u] = None;
            }
        }
    }

    let mut total = zero;
    let one = Complex::new(Rational::one(), Rational::zero());
    go(0, 2 * m, n, &labels, &mut assigned, plain, starred, &one, &mut total);
    total
}

fn group_choices(t: &ParticleTensor) -> (Vec<GroupChoice>, Vec<GroupChoice>) {
    let plain = t
        .coeffs
        .iter()
        .map(|(w, c)| GroupChoice {
            indices: w.clone(),
            weight: c.clone(),
        })
        .collect();
    let starred = t
        .coeffs
        .iter()
        .map(|(w, c)| GroupChoice {
            indices: w.iter().rev().copied().collect(),
            weight: c.conj(),
        })
        .collect();
    (plain, starred)
}

/// `‖T‖₂ₘ^{2m} = Σ_{π∈NC*(n,m)} κ_π · S(π, T)`, given the non-zero
/// `(π, κ_π)` terms from [`alternating_terms`].
pub fn particle_moment_with_terms(
    terms: &[(Partition, Rational)],
    t: &ParticleTensor,
    m: usize,
) -> Result<Rational> {
    let n = t.n;
    if let Some((pi, _)) = terms.first() {
        if pi.size() != 2 * n * m {
            return Err(Error::arg("cumulant terms do not match (n, m)"));
        }
    }
    if t.is_zero() {
        return Ok(Rational::zero());
    }
    let (plain, starred) = group_choices(t);
    let sum: Complex = terms
        .par_iter()
        .map(|(pi, k)| {
            let s = contraction(pi, n, m, &plain, &starred);
            Complex::new(s.re * k, s.im * k)
        })
        .reduce(
            || Complex::new(Rational::zero(), Rational::zero()),
            |a, b| a + b,
        );
    if !sum.im.is_zero() {
        return Err(Error::arg(format!(
            "moment has non-zero imaginary part {}",
            exact::format_rational(&sum.im)
        )));
    }
    Ok(sum.re)
}

/// `‖T‖₂ₘ^{2m}` for `T` in the `n`-particle space of a free family of
/// copies of the element with determining sequence `seq`.
pub fn particle_moment(
    seq: &DeterminingSequence,
    t: &ParticleTensor,
    m: usize,
    limits: &Limits,
) -> Result<Rational> {
    if m == 0 {
        return Err(Error::arg("m must be positive"));
    }
    if t.n * m > seq.k_max() {
        return Err(Error::Truncation {
            order: t.n * m,
            k_max: seq.k_max(),
        });
    }
    let terms = alternating_terms(seq, t.n, m, limits)?;
    particle_moment_with_terms(&terms, t, m)
}

/// `‖T‖₂² = (Σ |λ|²) · α₁ⁿ`.
pub fn two_norm_sq(seq: &DeterminingSequence, t: &ParticleTensor) -> Result<Rational> {
    let a1 = seq.alpha(1)?;
    Ok(t.coeff_norm_sq() * num_traits::pow(a1.clone(), t.n))
}

/// Exact integer moment as a big integer, if it is one.
pub fn as_integer(x: &Rational) -> Option<BigInt> {
    x.is_integer().then(|| x.to_integer())
}
