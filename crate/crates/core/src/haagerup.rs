//! Finite-`m` checks of the norm inequalities for `n`-particle spaces.
//!
//! `‖T‖` is the limit of `‖T‖₂ₘ` and is never computed; every check here
//! compares `‖T‖₂ₘ` against a right-hand side that bounds `‖T‖`. Where both
//! sides are rational after raising to the `2m`-th power the comparison is
//! exact, otherwise floats are compared with a `1e-9` slack.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cumulants::{alternating_terms, particle_moment_with_terms, two_norm_sq, ParticleTensor};
use crate::exact::{self, ln_bigint, ln_rational, Rational};
use crate::models::RDiagonalModel;
use crate::partitions::{fuss_catalan, Limits, Partition};
use crate::{Error, Result};

/// Absolute slack for float comparisons.
pub const FLOAT_SLACK: f64 = 1e-9;

const HALF_LN_E: f64 = 0.5;

type Terms = Arc<Vec<(Partition, Rational)>>;

/// Caches the non-zero `(π, κ_π)` terms of one model per `(n, m)`.
pub struct MomentEngine<'a> {
    model: &'a RDiagonalModel,
    limits: Limits,
    terms: Mutex<HashMap<(usize, usize), Terms>>,
}

impl<'a> MomentEngine<'a> {
    pub fn new(model: &'a RDiagonalModel, limits: Limits) -> Self {
        MomentEngine {
            model,
            limits,
            terms: Mutex::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &RDiagonalModel {
        self.model
    }

    pub fn terms(&self, n: usize, m: usize) -> Result<Terms> {
        if n * m > self.model.seq.k_max() {
            return Err(Error::Truncation {
                order: n * m,
                k_max: self.model.seq.k_max(),
            });
        }
        if let Some(t) = self.terms.lock().unwrap().get(&(n, m)) {
            return Ok(t.clone());
        }
        let t = Arc::new(alternating_terms(&self.model.seq, n, m, &self.limits)?);
        self.terms.lock().unwrap().insert((n, m), t.clone());
        Ok(t)
    }

    /// `‖T‖₂ₘ^{2m}`.
    pub fn particle_moment(&self, t: &ParticleTensor, m: usize) -> Result<Rational> {
        if m == 0 {
            return Err(Error::arg("m must be positive"));
        }
        let terms = self.terms(t.n(), m)?;
        particle_moment_with_terms(&terms, t, m)
    }

    /// `Σ_{π∈NC*(n,m)} |κ_π|`.
    pub fn abs_cumulant_sum(&self, n: usize, m: usize) -> Result<Rational> {
        Ok(self.terms(n, m)?.iter().map(|(_, k)| k.abs()).sum())
    }

    /// `Σ_{π∈NC*(n,m)} κ_π`.
    pub fn moment(&self, n: usize, m: usize) -> Result<Rational> {
        Ok(self.terms(n, m)?.iter().map(|(_, k)| k.clone()).sum())
    }
}

/// `x^{1/k}` for a non-negative rational.
fn root(x: &Rational, k: usize) -> Result<f64> {
    if x.is_negative() {
        return Err(Error::arg(format!(
            "negative value {} where a norm power was expected",
            exact::format_rational(x)
        )));
    }
    Ok(exact::root_f64(x, k as u32))
}

/// `[Σ_{π∈NC*(n,m)} |κ_π|]^{1/2m} / ‖a‖₂ⁿ`.
pub fn main_lemma_bound(a: &RDiagonalModel, n: usize, m: usize, limits: &Limits) -> Result<f64> {
    let engine = MomentEngine::new(a, *limits);
    main_lemma_bound_with(&engine, n, m)
}

pub fn main_lemma_bound_with(engine: &MomentEngine, n: usize, m: usize) -> Result<f64> {
    let sum = engine.abs_cumulant_sum(n, m)?;
    if sum.is_zero() {
        return Ok(0.0);
    }
    let two = &engine.model().two_norm_sq;
    Ok((ln_rational(&sum) / (2 * m) as f64 - n as f64 * ln_rational(two) / 2.0).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityRow {
    pub m: usize,
    /// `‖T‖₂ₘ^{2m}`.
    #[serde(with = "exact::ratio_str")]
    pub lhs_power: Rational,
    /// The right-hand side raised to the `2m`-th power, when it is rational.
    #[serde(with = "exact::ratio_opt", skip_serializing_if = "Option::is_none")]
    pub rhs_power: Option<Rational>,
    pub lhs_float: f64,
    pub rhs_float: f64,
    pub slack_float: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub kind: &'static str,
    pub model: String,
    /// Set when the model has `β ≠ α`.
    pub experimental: bool,
    pub n: usize,
    /// `‖T‖₂²`.
    #[serde(with = "exact::ratio_str")]
    pub two_norm_sq: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<HaagerupConstant>,
    pub rows: Vec<InequalityRow>,
    /// `‖T‖₂ₘ` non-decreasing over the rows.
    pub nondecreasing: bool,
    pub verdict: bool,
}

impl InequalityReport {
    fn finish(
        kind: &'static str,
        a: &RDiagonalModel,
        n: usize,
        two_norm_sq: Rational,
        constant: Option<HaagerupConstant>,
        rows: Vec<InequalityRow>,
    ) -> Self {
        let nondecreasing = rows
            .windows(2)
            .all(|w| w[1].lhs_float >= w[0].lhs_float * (1.0 - 1e-12));
        InequalityReport {
            kind,
            model: a.name.clone(),
            experimental: a.is_experimental(),
            n,
            two_norm_sq,
            constant,
            verdict: rows.iter().all(|r| r.pass),
            nondecreasing,
            rows,
        }
    }

    /// One row per `m`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "m",
            "lhs_power",
            "rhs_power",
            "lhs_float",
            "rhs_float",
            "slack_float",
            "pass",
        ])
        .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.m.to_string(),
                exact::format_rational(&r.lhs_power),
                r.rhs_power
                    .as_ref()
                    .map(exact::format_rational)
                    .unwrap_or_default(),
                format!("{:e}", r.lhs_float),
                format!("{:e}", r.rhs_float),
                format!("{:e}", r.slack_float),
                r.pass.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Checks `‖T‖₂ₘ ≤ [Σ|κ_π|]^{1/2m} ‖T‖₂ / ‖a‖₂ⁿ` for `m = 1..=m_max` by
/// comparing `2m`-th powers exactly.
pub fn verify_main_lemma(
    a: &RDiagonalModel,
    t: &ParticleTensor,
    m_max: usize,
    limits: &Limits,
) -> Result<InequalityReport> {
    verify_main_lemma_with(&MomentEngine::new(a, *limits), t, m_max)
}

pub fn verify_main_lemma_with(
    engine: &MomentEngine,
    t: &ParticleTensor,
    m_max: usize,
) -> Result<InequalityReport> {
    let a = engine.model();
    let n = t.n();
    let tn = two_norm_sq(&a.seq, t)?;
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let lhs = engine.particle_moment(t, m)?;
        let sum = engine.abs_cumulant_sum(n, m)?;
        let rhs = sum * num_traits::pow(tn.clone(), m)
            / num_traits::pow(a.two_norm_sq.clone(), n * m);
        let (lf, rf) = (root(&lhs, 2 * m)?, root(&rhs, 2 * m)?);
        rows.push(InequalityRow {
            m,
            pass: lhs <= rhs,
            lhs_power: lhs,
            rhs_power: Some(rhs),
            lhs_float: lf,
            rhs_float: rf,
            slack_float: rf - lf,
        });
    }
    Ok(InequalityReport::finish("main_lemma", a, n, tn, None, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every stored `α_k, β_k` is non-negative; only checked up to `K_max`.
    Nonnegative,
    General,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaagerupConstant {
    pub value_float: f64,
    pub regime: Regime,
    /// Order up to which the cumulant signs were inspected.
    pub verified_to_k: usize,
    pub op_norm_kind: &'static str,
}

/// `C_a = √e ‖a‖/‖a‖₂` for non-negative cumulants, else `2¹⁰ √e ‖a‖²/‖a‖₂²`.
pub fn haagerup_constant(a: &RDiagonalModel) -> Result<HaagerupConstant> {
    let op = a.op_norm()?;
    let ln_norm = ln_rational(op.rational());
    let ln_two_sq = ln_rational(&a.two_norm_sq);
    let (regime, ln_c) = if a.seq.is_nonnegative() {
        (Regime::Nonnegative, HALF_LN_E + ln_norm - ln_two_sq / 2.0)
    } else {
        (
            Regime::General,
            10.0 * std::f64::consts::LN_2 + HALF_LN_E + 2.0 * ln_norm - ln_two_sq,
        )
    };
    Ok(HaagerupConstant {
        value_float: ln_c.exp(),
        regime,
        verified_to_k: a.seq.k_max(),
        op_norm_kind: op.kind(),
    })
}

/// Checks `‖T‖₂ₘ ≤ C_a √n ‖T‖₂` for `m = 1..=m_max`.
pub fn verify_strong_haagerup(
    a: &RDiagonalModel,
    t: &ParticleTensor,
    m_max: usize,
    limits: &Limits,
) -> Result<InequalityReport> {
    verify_strong_haagerup_with(&MomentEngine::new(a, *limits), t, m_max)
}

pub fn verify_strong_haagerup_with(
    engine: &MomentEngine,
    t: &ParticleTensor,
    m_max: usize,
) -> Result<InequalityReport> {
    let a = engine.model();
    let c = haagerup_constant(a)?;
    let n = t.n();
    let tn = two_norm_sq(&a.seq, t)?;
    let rhs = c.value_float * (n as f64).sqrt() * root(&tn, 2)?;
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let lhs = engine.particle_moment(t, m)?;
        let lf = root(&lhs, 2 * m)?;
        rows.push(InequalityRow {
            m,
            lhs_power: lhs,
            rhs_power: None,
            lhs_float: lf,
            rhs_float: rhs,
            slack_float: rhs - lf,
            pass: lf <= rhs + FLOAT_SLACK,
        });
    }
    Ok(InequalityReport::finish("strong_haagerup", a, n, tn, Some(c), rows))
}

/// `‖cⁿ‖² = (n+1)^{n+1} / nⁿ`.
pub fn circular_power_norm(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let n_big = BigInt::from(n);
    Ok(Rational::new(
        num_traits::pow(&n_big + 1, n + 1),
        num_traits::pow(n_big, n),
    ))
}

/// `(C^{(n)}_m)^{1/m}`, which tends to `‖cⁿ‖²` as `m → ∞`.
pub fn fuss_catalan_root(n: usize, m: usize) -> f64 {
    (ln_bigint(&fuss_catalan(n as u64, m as u64)) / m as f64).exp()
}

/// `√e √n ‖a‖ ‖a‖₂^{n−1}`.
pub fn larsen_power_bound(a: &RDiagonalModel, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let op = a.op_norm()?;
    Ok((HALF_LN_E
        + 0.5 * (n as f64).ln()
        + ln_rational(op.rational())
        + (n - 1) as f64 * ln_rational(&a.two_norm_sq) / 2.0)
        .exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormRow {
    pub n: usize,
    pub m: usize,
    pub lhs_float: f64,
    pub rhs_float: f64,
    pub pass: bool,
}

/// `(C^{(n)}_m)^{1/2m} ≤ √e √(n+1)` over a grid; returns the failing rows
/// (empty when all pass) and the number of points checked.
pub fn circular_closed_form_check(n_max: usize, m_max: usize) -> (Vec<ClosedFormRow>, usize) {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 1..=n_max {
        let rhs = (HALF_LN_E + 0.5 * ((n + 1) as f64).ln()).exp();
        for m in 1..=m_max {
            let lhs = (ln_bigint(&fuss_catalan(n as u64, m as u64)) / (2 * m) as f64).exp();
            checked += 1;
            if lhs > rhs + FLOAT_SLACK {
                failures.push(ClosedFormRow {
                    n,
                    m,
                    lhs_float: lhs,
                    rhs_float: rhs,
                    pass: false,
                });
            }
        }
    }
    (failures, checked)
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessRow {
    pub m: usize,
    /// `‖T_k‖₂ₘ^{2m}`.
    #[serde(with = "exact::ratio_str")]
    pub moment: Rational,
    pub norm_float: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessReport {
    pub k: usize,
    /// `‖T_k‖₂² = k`.
    #[serde(with = "exact::ratio_str")]
    pub two_norm_sq: Rational,
    pub rows: Vec<SharpnessRow>,
    /// `‖T_k‖ = 2√(k−1)`.
    pub target_float: f64,
    /// `2√((k−1)/k)`, the ratio `‖T_k‖/‖T_k‖₂`.
    pub ratio_target_float: f64,
    pub ratio_exceeds_sqrt_e: bool,
    pub nondecreasing: bool,
    pub bounded: bool,
    pub verdict: bool,
}

/// `T_k = u₁ + … + u_k` for free Haar unitaries: `‖T_k‖₂ₘ` for `m ≤ m_max`
/// against the limit `2√(k−1)`.
pub fn sharpness_haar(
    a: &RDiagonalModel,
    k: usize,
    m_max: usize,
    limits: &Limits,
) -> Result<SharpnessReport> {
    if k < 2 {
        return Err(Error::arg("sharpness needs k >= 2"));
    }
    let engine = MomentEngine::new(a, *limits);
    let t = ParticleTensor::sum_of_generators(k)?;
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let moment = engine.particle_moment(&t, m)?;
        let norm_float = root(&moment, 2 * m)?;
        rows.push(SharpnessRow {
            m,
            moment,
            norm_float,
        });
    }
    let target = 2.0 * ((k - 1) as f64).sqrt();
    let ratio = 2.0 * ((k - 1) as f64 / k as f64).sqrt();
    let nondecreasing = rows
        .windows(2)
        .all(|w| w[1].norm_float >= w[0].norm_float * (1.0 - 1e-12));
    let bounded = rows.iter().all(|r| r.norm_float <= target + FLOAT_SLACK);
    Ok(SharpnessReport {
        k,
        two_norm_sq: two_norm_sq(&a.seq, &t)?,
        rows,
        target_float: target,
        ratio_target_float: ratio,
        ratio_exceeds_sqrt_e: ratio > HALF_LN_E.exp(),
        verdict: nondecreasing && bounded,
        nondecreasing,
        bounded,
    })
}

/// `Σ_{π∈NC*(n,m)} |κ_π[a]| ≤ φ[(bⁿ(b*)ⁿ)^m]` for the dominating model `b`.
pub fn domination_holds(
    a: &RDiagonalModel,
    b: &RDiagonalModel,
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<(Rational, Rational, bool)> {
    let lhs = MomentEngine::new(a, *limits).abs_cumulant_sum(n, m)?;
    let rhs = MomentEngine::new(b, *limits).moment(n, m)?;
    let ok = lhs <= rhs;
    Ok((lhs, rhs, ok))
}

/// `m`-th root helper used in closed-form comparisons: `x^{1/2m}` for an
/// integer.
pub fn int_root(x: &BigInt, k: usize) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    (ln_bigint(x) / k as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::models::{b_model, circular, haar_unitary};

    #[test]
    fn lemma_bounds() {
        let limits = Limits::default();
        let c = circular(8);
        for (n, m) in [(1, 1), (2, 2), (3, 2)] {
            let expected = int_root(&fuss_catalan(n as u64, m as u64), 2 * m);
            assert!((main_lemma_bound(&c, n, m, &limits).unwrap() - expected).abs() < 1e-12);
        }
        let u = haar_unitary(8);
        assert!((main_lemma_bound(&u, 1, 1, &limits).unwrap() - 1.0).abs() < 1e-12);
        assert!((main_lemma_bound(&u, 1, 2, &limits).unwrap() - 3f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn main_lemma_examples() {
        let limits = Limits::default();
        let t = ParticleTensor::sum_of_generators(2).unwrap();
        let r = verify_main_lemma(&circular(8), &t, 2, &limits).unwrap();
        assert!(r.verdict);
        assert_eq!(r.rows[1].lhs_power, int(8));
        assert_eq!(r.rows[1].rhs_power, Some(int(8)));
        let r = verify_main_lemma(&haar_unitary(8), &t, 2, &limits).unwrap();
        assert!(r.verdict);
        assert_eq!(r.rows[1].lhs_power, int(6));
        assert_eq!(r.rows[1].rhs_power, Some(int(12)));
        let single = ParticleTensor::single_word(2, rat(3, 2)).unwrap();
        for a in [circular(8), haar_unitary(8), b_model(&int(1), &int(1), 8).unwrap()] {
            let r = verify_main_lemma(&a, &single, 1, &limits).unwrap();
            assert_eq!(r.rows[0].lhs_power, r.rows[0].rhs_power.clone().unwrap());
        }
    }

    #[test]
    fn constants() {
        let e = 1f64.exp().sqrt();
        let c = haagerup_constant(&circular(8)).unwrap();
        assert_eq!(c.regime, Regime::Nonnegative);
        assert!((c.value_float - 2.0 * e).abs() < 1e-12);
        let u = haagerup_constant(&haar_unitary(8)).unwrap();
        assert_eq!(u.regime, Regime::General);
        assert!((u.value_float - 1024.0 * e).abs() < 1e-9);
        let b = b_model(&int(1), &int(1), 8).unwrap();
        let cb = haagerup_constant(&b).unwrap();
        assert_eq!(cb.regime, Regime::Nonnegative);
        let bound = exact::to_f64(b.op_norm().unwrap().rational());
        assert!((cb.value_float - e * bound).abs() < 1e-9);
    }

    #[test]
    fn strong_haagerup_examples() {
        let limits = Limits::default();
        let t4 = ParticleTensor::sum_of_generators(4).unwrap();
        let r = verify_strong_haagerup(&haar_unitary(8), &t4, 2, &limits).unwrap();
        assert!(r.verdict);
        assert_eq!(r.rows[1].lhs_power, int(28));
        let zero = ParticleTensor::with_alphabet(1, 2).unwrap();
        let r = verify_strong_haagerup(&circular(8), &zero, 3, &limits).unwrap();
        assert!(r.verdict);
        assert!(r.rows.iter().all(|row| row.lhs_float == 0.0));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["rows"][0]["lhs_power"], "0/1");
        assert!(r.to_csv().unwrap().starts_with("m,lhs_power"));
    }

    #[test]
    fn circular_closed_forms() {
        assert_eq!(circular_power_norm(1).unwrap(), int(4));
        assert_eq!(circular_power_norm(2).unwrap(), rat(27, 4));
        assert_eq!(circular_power_norm(3).unwrap(), rat(256, 27));
        let c = circular(8);
        assert!((larsen_power_bound(&c, 1).unwrap() - 2.0 * 1f64.exp().sqrt()).abs() < 1e-12);
        for n in 1..=12 {
            let exact = exact::root_f64(&circular_power_norm(n).unwrap(), 2);
            assert!(exact <= larsen_power_bound(&c, n).unwrap());
        }
        let u = haar_unitary(8);
        for n in 1..=5 {
            let v = larsen_power_bound(&u, n).unwrap();
            assert!((v - (0.5 + 0.5 * (n as f64).ln()).exp()).abs() < 1e-12 && v >= 1.0);
        }
        let (fails, checked) = circular_closed_form_check(4, 20);
        assert!(fails.is_empty());
        assert_eq!(checked, 80);
    }

    #[test]
    fn sharpness() {
        let limits = Limits::default();
        let u = haar_unitary(8);
        let r = sharpness_haar(&u, 2, 3, &limits).unwrap();
        assert_eq!(r.two_norm_sq, int(2));
        assert_eq!(r.rows[1].moment, int(6));
        assert!(r.verdict && !r.ratio_exceeds_sqrt_e);
        assert!((r.target_float - 2.0).abs() < 1e-15);
        let r5 = sharpness_haar(&u, 5, 1, &limits).unwrap();
        assert!(r5.ratio_exceeds_sqrt_e);
        assert!((r5.ratio_target_float - 1.7888543819998317).abs() < 1e-12);
        assert!(sharpness_haar(&u, 1, 1, &limits).is_err());
    }
}
