//! Lattice and moment-cumulant invariants on randomly drawn inputs.

use freehaag::cumulants::{
    cumulants_from_moments, kappa_block, kappa_pi, DeterminingSequence, FnMoments,
    SequenceMoments,
};
use freehaag::partitions::{
    catalan, enumerate_multichains, enumerate_nc, fuss_catalan, leq, mobius, mobius_factorized,
};
use freehaag::{Limits, Partition, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn nc_partition(max_n: usize) -> impl Strategy<Value = Partition> {
    (1..=max_n).prop_flat_map(|n| {
        let c: usize = catalan(n as u64).try_into().unwrap();
        (0..c).prop_map(move |k| enumerate_nc(n, &Limits::default()).unwrap().nth(k).unwrap())
    })
}

/// A pair `σ ≤ π` in `NC(n)`, `σ` drawn uniformly from the interval below `π`.
fn nc_pair(max_n: usize) -> impl Strategy<Value = (Partition, Partition)> {
    (nc_partition(max_n), any::<u64>()).prop_map(|(pi, seed)| {
        let n = pi.size();
        let below: Vec<Partition> = enumerate_nc(n, &Limits::default())
            .unwrap()
            .filter(|s| leq(s, &pi).unwrap())
            .collect();
        let s = below[(seed % below.len() as u64) as usize].clone();
        (s, pi)
    })
}

fn alternating_flags(max_len: usize) -> impl Strategy<Value = Vec<bool>> {
    (1..=max_len, any::<bool>()).prop_map(|(k, start)| (0..k).map(|i| (i % 2 == 1) != start).collect())
}

fn rational_seq(k: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-5i64..=5, 1i64..=4), k)
        .prop_map(|v| v.into_iter().map(|(p, q)| Rational::new(p.into(), q.into())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn factorized_mobius_agrees((s, pi) in nc_pair(8)) {
        prop_assert_eq!(mobius(&s, &pi).unwrap(), mobius_factorized(&s, &pi).unwrap());
    }

    #[test]
    fn mobius_inverts_zeta(pi in nc_partition(7)) {
        // Σ_{σ ≤ π} μ(σ, π) = 0 unless π is the bottom
        let total: BigInt = enumerate_nc(pi.size(), &Limits::default())
            .unwrap()
            .filter(|s| leq(s, &pi).unwrap())
            .map(|s| mobius(&s, &pi).unwrap())
            .sum();
        let want = if pi == Partition::bottom(pi.size()) { BigInt::one() } else { BigInt::zero() };
        prop_assert_eq!(total, want);
    }

    #[test]
    fn partition_text_roundtrip(pi in nc_partition(9)) {
        let back: Partition = pi.to_string().parse().unwrap();
        prop_assert_eq!(&back, &pi);
        let json = serde_json::to_string(&pi).unwrap();
        let back: Partition = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, pi);
    }

    #[test]
    fn leq_is_a_partial_order(a in nc_partition(6), b in nc_partition(6)) {
        prop_assume!(a.size() == b.size());
        let bottom = Partition::bottom(a.size());
        let top = Partition::top(a.size());
        prop_assert!(leq(&bottom, &a).unwrap() && leq(&a, &top).unwrap());
        prop_assert!(leq(&a, &a).unwrap());
        if leq(&a, &b).unwrap() && leq(&b, &a).unwrap() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn cumulants_invert_moments(
        alpha in rational_seq(8),
        beta in rational_seq(8),
        flags in alternating_flags(8),
        seed in any::<u64>(),
    ) {
        let seq = DeterminingSequence::new(alpha, beta).unwrap();
        let limits = Limits::default();
        let phi = SequenceMoments { seq: &seq, limits };
        let pis: Vec<Partition> = enumerate_nc(flags.len(), &limits).unwrap().collect();
        let pi = &pis[(seed % pis.len() as u64) as usize];
        let got = cumulants_from_moments(&phi, &flags, pi, &limits).unwrap();
        prop_assert_eq!(got, kappa_pi(&seq, &flags, pi).unwrap());
    }
}

/// A single Haar unitary commutes with its adjoint, so a word has moment 1
/// exactly when it has as many `u` as `u*`.
fn haar_single(flags: &[bool]) -> freehaag::Result<Rational> {
    let stars = flags.iter().filter(|&&s| s).count();
    Ok(Rational::from_integer(BigInt::from(u8::from(2 * stars == flags.len()))))
}

#[test]
fn haar_cumulants_from_unitarity() {
    // α_k = (−1)^{k−1} C_{k−1} on alternating words, zero elsewhere
    let limits = Limits::default();
    let phi = FnMoments(haar_single);
    for len in 1..=8 {
        for code in 0..1u32 << len {
            let flags: Vec<bool> = (0..len).map(|i| code >> i & 1 == 1).collect();
            let got = cumulants_from_moments(&phi, &flags, &Partition::top(len), &limits).unwrap();
            let alternating = len % 2 == 0 && flags.windows(2).all(|w| w[0] != w[1]);
            let want = if alternating {
                let k = len / 2;
                let c = Rational::from_integer(catalan(k as u64 - 1));
                if k % 2 == 1 { c } else { -c }
            } else {
                Rational::zero()
            };
            assert_eq!(got, want, "flags {flags:?}");
        }
    }
}

#[test]
fn stored_haar_sequence_matches_unitarity() {
    let haar = freehaag::models::haar_unitary(6);
    let limits = Limits::default();
    let phi = FnMoments(haar_single);
    for k in 1..=6 {
        for start in [false, true] {
            let flags: Vec<bool> = (0..2 * k).map(|i| (i % 2 == 1) != start).collect();
            let from_moments = cumulants_from_moments(&phi, &flags, &Partition::top(2 * k), &limits).unwrap();
            assert_eq!(from_moments, kappa_block(&haar.seq, &flags).unwrap());
        }
    }
}

#[test]
fn multichains_counted_by_fuss_catalan() {
    for (n, m) in [(1, 5), (2, 4), (3, 3), (4, 3), (5, 2)] {
        let c = enumerate_multichains(n, m, &Limits::default()).unwrap().count();
        assert_eq!(BigInt::from(c), fuss_catalan(n as u64, m as u64));
    }
}
