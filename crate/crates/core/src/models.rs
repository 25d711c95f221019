//! Built-in R-diagonal models, the dominating-model construction and two
//! independent oracles used to cross-check the cumulant machinery.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cumulants::{DeterminingSequence, StarWord};
use crate::exact::{self, format_rational, int, parse_rational, Rational};
use crate::partitions::catalan;
use crate::{Error, Result};

/// Truncation order used by the built-in models.
pub const DEFAULT_K_MAX: usize = 32;

/// `‖a‖`, or a certified upper bound for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpNorm {
    Value(#[serde(with = "exact::ratio_str")] Rational),
    UpperBound(#[serde(with = "exact::ratio_str")] Rational),
}

impl OpNorm {
    pub fn rational(&self) -> &Rational {
        match self {
            OpNorm::Value(r) | OpNorm::UpperBound(r) => r,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            OpNorm::Value(_) => "exact",
            OpNorm::UpperBound(_) => "upper_bound",
        }
    }
}

/// Parameters of `b_{γ,λ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BParams {
    #[serde(with = "exact::ratio_str")]
    pub gamma: Rational,
    #[serde(with = "exact::ratio_str")]
    pub lambda: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RDiagonalModel {
    pub name: String,
    pub seq: DeterminingSequence,
    /// `‖a‖₂²`.
    pub two_norm_sq: Rational,
    pub op_norm: Option<OpNorm>,
    pub b_params: Option<BParams>,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    name: String,
    #[serde(with = "exact::ratio_vec")]
    alpha: Vec<Rational>,
    #[serde(with = "exact::ratio_vec_opt", default, skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<Rational>>,
    #[serde(with = "exact::ratio_str")]
    two_norm_sq: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    op_norm: Option<OpNorm>,
}

impl RDiagonalModel {
    pub fn new(
        name: impl Into<String>,
        seq: DeterminingSequence,
        two_norm_sq: Rational,
        op_norm: Option<OpNorm>,
    ) -> Result<Self> {
        let name = name.into();
        if !two_norm_sq.is_positive() {
            return Err(Error::arg(format!("{name}: two_norm_sq must be positive")));
        }
        if seq.alpha(1)? != &two_norm_sq {
            return Err(Error::arg(format!(
                "{name}: alpha_1 = {} differs from two_norm_sq = {}",
                format_rational(seq.alpha(1)?),
                format_rational(&two_norm_sq)
            )));
        }
        if let Some(op) = &op_norm {
            let r = op.rational();
            if r * r < two_norm_sq {
                return Err(Error::arg(format!(
                    "{name}: operator norm {} is below the 2-norm",
                    format_rational(r)
                )));
            }
        }
        Ok(RDiagonalModel {
            name,
            seq,
            two_norm_sq,
            op_norm,
            b_params: None,
        })
    }

    pub fn op_norm(&self) -> Result<&OpNorm> {
        self.op_norm
            .as_ref()
            .ok_or_else(|| Error::Capability(format!("model {} has no operator norm", self.name)))
    }

    /// Models with `β ≠ α` depend on the linear block-reading convention.
    pub fn is_experimental(&self) -> bool {
        !self.seq.is_tracial()
    }

    pub fn two_norm_f64(&self) -> f64 {
        exact::root_f64(&self.two_norm_sq, 2)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: ModelRecord = serde_json::from_str(text)?;
        let seq = match rec.beta {
            Some(beta) => DeterminingSequence::new(rec.alpha, beta)?,
            None => DeterminingSequence::tracial(rec.alpha)?,
        };
        Self::new(rec.name, seq, rec.two_norm_sq, rec.op_norm)
    }

    pub fn to_json(&self) -> String {
        let rec = ModelRecord {
            name: self.name.clone(),
            alpha: self.seq.alphas().to_vec(),
            beta: (!self.seq.is_tracial()).then(|| self.seq.betas().to_vec()),
            two_norm_sq: self.two_norm_sq.clone(),
            op_norm: self.op_norm.clone(),
        };
        serde_json::to_string_pretty(&rec).expect("model records serialize")
    }
}

/// `c`: `α₁ = β₁ = 1`, all other cumulants zero, `‖c‖ = 2`.
pub fn circular(k_max: usize) -> RDiagonalModel {
    let seq = DeterminingSequence::from_fn(k_max.max(1), |k| int(i64::from(k == 1)))
        .expect("non-empty");
    RDiagonalModel::new("circular", seq, int(1), Some(OpNorm::Value(int(2))))
        .expect("consistent built-in")
}

/// `u`: `α_k = β_k = (−1)^{k−1} C_{k−1}`, `‖u‖ = 1`.
pub fn haar_unitary(k_max: usize) -> RDiagonalModel {
    let seq = DeterminingSequence::from_fn(k_max.max(1), |k| {
        let c = Rational::from_integer(catalan(k as u64 - 1));
        if k % 2 == 1 {
            c
        } else {
            -c
        }
    })
    .expect("non-empty");
    RDiagonalModel::new("haar", seq, int(1), Some(OpNorm::Value(int(1))))
        .expect("consistent built-in")
}

/// A rational `s` with `s² ≥ x`, close to `√x`.
fn sqrt_upper(x: &Rational) -> Rational {
    let mut s = exact::upper_rational(exact::root_f64(x, 2));
    let step = Rational::one() + Rational::new(BigInt::one(), BigInt::one() << 40);
    while &(&s * &s) < x {
        s *= &step;
    }
    s
}

/// A rational `s` with `0 < s² ≤ x`, close to `√x`.
fn sqrt_lower(x: &Rational) -> Rational {
    let mut s = exact::from_f64(exact::root_f64(x, 2) * (1.0 - 8.0 * f64::EPSILON));
    let step = Rational::one() - Rational::new(BigInt::one(), BigInt::one() << 40);
    while &(&s * &s) > x {
        s *= &step;
    }
    s
}

/// The exact square root of a rational, when it has one.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (p, q) = (x.numer().sqrt(), x.denom().sqrt());
    (&p * &p == *x.numer() && &q * &q == *x.denom()).then(|| Rational::new(p, q))
}

/// `b_{γ,λ}`: `α_k = β_k = γ λ^{2k}`, `‖b‖₂² = γλ²`, and `‖b‖` bounded by
/// `2λ(1 + √(γ/2))²`.
pub fn b_model(gamma: &Rational, lambda: &Rational, k_max: usize) -> Result<RDiagonalModel> {
    if !gamma.is_positive() || !lambda.is_positive() {
        return Err(Error::arg("b model needs gamma, lambda > 0"));
    }
    let l2 = lambda * lambda;
    let mut power = l2.clone();
    let mut alpha = Vec::with_capacity(k_max);
    for _ in 0..k_max.max(1) {
        alpha.push(gamma * &power);
        power *= &l2;
    }
    let seq = DeterminingSequence::tracial(alpha)?;
    let s = sqrt_upper(&(gamma / int(2)));
    let one_plus = Rational::one() + s;
    let bound = int(2) * lambda * &one_plus * &one_plus;
    let name = format!(
        "b({},{})",
        format_rational(gamma),
        format_rational(lambda)
    );
    let mut model = RDiagonalModel::new(name, seq, gamma * &l2, Some(OpNorm::UpperBound(bound)))?;
    model.b_params = Some(BParams {
        gamma: gamma.clone(),
        lambda: lambda.clone(),
    });
    Ok(model)
}

/// `b_{γ,λ}` with `λ = 2⁸‖a‖²/‖a‖₂` and `γ = ‖a‖₂² λ⁻²`, so that
/// `‖b‖₂ = ‖a‖₂` and every cumulant of `b` dominates the matching one of
/// `a` in absolute value. When `‖a‖₂` is irrational `λ` is rounded up.
pub fn dominating_model(a: &RDiagonalModel) -> Result<RDiagonalModel> {
    let norm = a.op_norm()?.rational();
    let two_norm = exact_sqrt(&a.two_norm_sq).unwrap_or_else(|| sqrt_lower(&a.two_norm_sq));
    let lambda = int(256) * norm * norm / two_norm;
    let gamma = &a.two_norm_sq / (&lambda * &lambda);
    let mut b = b_model(&gamma, &lambda, a.seq.k_max())?;
    b.name = format!("dominating({})", a.name);
    for k in 1..=a.seq.k_max() {
        let bk = b.seq.alpha(k)?;
        if bk < &a.seq.alpha(k)?.abs() || bk < &a.seq.beta(k)?.abs() {
            return Err(Error::arg(format!(
                "dominating model fails at order {k} for {}",
                a.name
            )));
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub k: usize,
    #[serde(with = "exact::ratio_str")]
    pub alpha_abs: Rational,
    #[serde(with = "exact::ratio_str")]
    pub beta_abs: Rational,
    #[serde(with = "exact::ratio_str")]
    pub bound: Rational,
    /// `bound − max(|α_k|, |β_k|)`.
    #[serde(with = "exact::ratio_str")]
    pub margin: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub model: String,
    pub op_norm_kind: &'static str,
    pub rows: Vec<GrowthRow>,
    pub verdict: bool,
}

/// Checks `|α_k|, |β_k| ≤ ½ (2⁴‖a‖)^{2k}` for `k = 1..=K`, exactly.
pub fn cumulant_growth_bound(a: &RDiagonalModel, k: usize) -> Result<GrowthReport> {
    let op = a.op_norm()?;
    if k > a.seq.k_max() {
        return Err(Error::Truncation {
            order: k,
            k_max: a.seq.k_max(),
        });
    }
    let base = int(16) * op.rational();
    let base_sq = &base * &base;
    let mut bound = Rational::new(BigInt::one(), BigInt::from(2)) * &base_sq;
    let mut rows = Vec::with_capacity(k);
    for order in 1..=k {
        let alpha_abs = a.seq.alpha(order)?.abs();
        let beta_abs = a.seq.beta(order)?.abs();
        let worst = alpha_abs.clone().max(beta_abs.clone());
        rows.push(GrowthRow {
            k: order,
            margin: &bound - &worst,
            pass: worst <= bound,
            alpha_abs,
            beta_abs,
            bound: bound.clone(),
        });
        bound *= &base_sq;
    }
    Ok(GrowthReport {
        model: a.name.clone(),
        op_norm_kind: op.kind(),
        verdict: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// `φ(w)` for `w` a word in free Haar unitaries: 1 iff `w` reduces to the
/// identity in the free group, with `u_i* = u_i⁻¹`.
pub fn free_group_moment_oracle(w: &StarWord) -> Rational {
    let mut stack: Vec<(usize, bool)> = Vec::with_capacity(w.len());
    for l in w.letters() {
        match stack.last() {
            Some(&(i, s)) if i == l.index && s != l.star => {
                stack.pop();
            }
            _ => stack.push((l.index, l.star)),
        }
    }
    int(i64::from(stack.is_empty()))
}

/// `φ(P_n(s)^{2m})` for a standard semicircular `s`, where
/// `P₀ = 1, P₁ = x, P_{k+1} = x P_k − P_{k−1}`.
pub fn chebyshev_moment_oracle(n: usize, m: usize) -> BigInt {
    // coefficient vectors, index = degree
    let mut prev = vec![BigInt::one()];
    let mut cur = vec![BigInt::zero(), BigInt::one()];
    if n == 0 {
        cur = prev.clone();
    }
    for _ in 1..n {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (d, c) in cur.iter().enumerate() {
            next[d + 1] += c;
        }
        for (d, c) in prev.iter().enumerate() {
            next[d] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let mut power = vec![BigInt::one()];
    for _ in 0..2 * m {
        let mut next = vec![BigInt::zero(); power.len() + cur.len() - 1];
        for (i, a) in power.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in cur.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        power = next;
    }
    power
        .iter()
        .enumerate()
        .filter(|(d, _)| d % 2 == 0)
        .map(|(d, c)| c * catalan(d as u64 / 2))
        .sum()
}

/// Resolves `circular`, `haar`, `b:GAMMA:LAMBDA`, or a path to a model JSON file.
pub fn resolve(name: &str, k_max: usize) -> Result<RDiagonalModel> {
    match name {
        "circular" => return Ok(circular(k_max)),
        "haar" | "haar_unitary" => return Ok(haar_unitary(k_max)),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("b:") {
        let (g, l) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected b:GAMMA:LAMBDA, got {name:?}")))?;
        return b_model(&parse_rational(g)?, &parse_rational(l)?, k_max);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::Parse(format!(
            "unknown model {name:?} (expected circular, haar, b:GAMMA:LAMBDA or a file)"
        )));
    }
    RDiagonalModel::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn circular_data() {
        let c = circular(DEFAULT_K_MAX);
        assert_eq!(c.seq.alpha(1).unwrap(), &int(1));
        assert_eq!(c.seq.alpha(3).unwrap(), &int(0));
        assert_eq!(c.op_norm().unwrap(), &OpNorm::Value(int(2)));
        assert_eq!(c.seq.k_max(), 32);
    }

    #[test]
    fn haar_data() {
        let u = haar_unitary(DEFAULT_K_MAX);
        assert_eq!(u.seq.alpha(1).unwrap(), &int(1));
        assert_eq!(u.seq.alpha(2).unwrap(), &int(-1));
        assert_eq!(u.seq.alpha(4).unwrap(), &int(-5));
        assert_eq!(u.seq.beta(4).unwrap(), &int(-5));
    }

    #[test]
    fn b_model_data() {
        let b = b_model(&int(1), &int(1), 8).unwrap();
        assert!(b.seq.alphas().iter().all(|x| x == &int(1)));
        assert_eq!(b.two_norm_sq, int(1));
        let bound = exact::to_f64(b.op_norm().unwrap().rational());
        let exact_bound = 2.0 * (1.0 + 0.5f64.sqrt()).powi(2);
        assert!(bound >= exact_bound && bound - exact_bound < 1e-9);
        let b = b_model(&rat(1, 4), &int(2), 4).unwrap();
        assert_eq!(b.seq.alpha(2).unwrap(), &int(4));
        assert!(b_model(&int(0), &int(1), 4).is_err());
    }

    #[test]
    fn dominating_haar() {
        let u = haar_unitary(10);
        let b = dominating_model(&u).unwrap();
        let p = b.b_params.as_ref().unwrap();
        assert_eq!(p.lambda, int(256));
        assert_eq!(p.gamma, rat(1, 65536));
        assert_eq!(b.seq.alpha(1).unwrap(), &int(1));
        assert_eq!(b.seq.alpha(2).unwrap(), &int(65536));
        assert_eq!(b.two_norm_sq, u.two_norm_sq);
        assert!(cumulant_growth_bound(&b, 10).unwrap().verdict);
    }

    #[test]
    fn dominating_with_irrational_two_norm() {
        let seq = DeterminingSequence::from_fn(6, |k| if k == 1 { int(2) } else { int(-1) }).unwrap();
        let a = RDiagonalModel::new("custom", seq, int(2), Some(OpNorm::UpperBound(int(3)))).unwrap();
        let b = dominating_model(&a).unwrap();
        assert_eq!(b.two_norm_sq, int(2));
        for k in 1..=6 {
            assert!(b.seq.alpha(k).unwrap() >= &a.seq.alpha(k).unwrap().abs());
        }
        let none = RDiagonalModel::new(
            "no-norm",
            DeterminingSequence::tracial(vec![int(1)]).unwrap(),
            int(1),
            None,
        )
        .unwrap();
        assert!(matches!(dominating_model(&none), Err(Error::Capability(_))));
    }

    #[test]
    fn growth_bounds() {
        assert!(cumulant_growth_bound(&haar_unitary(8), 4).unwrap().verdict);
        assert!(cumulant_growth_bound(&circular(8), 4).unwrap().verdict);
        let seq = DeterminingSequence::from_fn(2, |k| if k == 1 { int(1) } else { int(1 << 20) }).unwrap();
        let bad = RDiagonalModel::new("bad", seq, int(1), Some(OpNorm::Value(int(1)))).unwrap();
        let r = cumulant_growth_bound(&bad, 2).unwrap();
        assert!(r.rows[0].pass && !r.rows[1].pass && !r.verdict);
    }

    #[test]
    fn free_group_oracle() {
        let w = |s: &str| s.parse::<StarWord>().unwrap();
        assert_eq!(free_group_moment_oracle(&w("1 1*")), int(1));
        assert_eq!(free_group_moment_oracle(&w("1 2*")), int(0));
        assert_eq!(free_group_moment_oracle(&w("1 2* 2 1*")), int(1));
        assert_eq!(free_group_moment_oracle(&w("1* 1")), int(1));
    }

    #[test]
    fn chebyshev_oracle() {
        assert_eq!(chebyshev_moment_oracle(1, 2), BigInt::from(2));
        for n in 0..6 {
            assert_eq!(chebyshev_moment_oracle(n, 1), BigInt::one());
        }
        assert_eq!(chebyshev_moment_oracle(2, 2), BigInt::from(3));
    }

    #[test]
    fn model_json() {
        let text = r#"{"name":"mine","alpha":["1","-1/2"],"two_norm_sq":"1","op_norm":{"upper_bound":"3/2"}}"#;
        let m = RDiagonalModel::from_json(text).unwrap();
        assert_eq!(m.seq.beta(2).unwrap(), &rat(-1, 2));
        assert_eq!(m.op_norm().unwrap().kind(), "upper_bound");
        assert_eq!(RDiagonalModel::from_json(&m.to_json()).unwrap(), m);
        let asym = r#"{"name":"x","alpha":["1"],"beta":["1"],"two_norm_sq":"2/2","op_norm":{"value":"1"}}"#;
        assert!(!RDiagonalModel::from_json(asym).unwrap().is_experimental());
        let wrong = r#"{"name":"x","alpha":["2"],"two_norm_sq":"1"}"#;
        assert!(RDiagonalModel::from_json(wrong).is_err());
        assert!(resolve("b:1/4:2", 4).is_ok());
        assert!(resolve("nonsense", 4).is_err());
    }
}
