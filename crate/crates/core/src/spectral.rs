//! Scalar bounds for the number-operator semigroup `e^{−tN}` and the radial
//! Haagerup ratio of a rotationally invariant Brown measure.

use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

/// `t e^{−t} / (1 − e^{−2t}) = t / (2 sinh t)`, which decreases from `1/2`.
pub fn kernel_profile(t: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    t / (2.0 * t.sinh())
}

/// `C_a e^{−t} / (1 − e^{−2t})`.
pub fn ou_kernel_bound(t: f64, c_a: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::arg(format!("t must be positive, got {t}")));
    }
    Ok(c_a * (-t).exp() / -(-2.0 * t).exp_m1())
}

/// Points of `(0, ∞)` at which the kernel is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct TGrid(pub Vec<f64>);

impl FromStr for TGrid {
    type Err = Error;

    /// `start:stop:count` (linear), `log:start:stop:count` (geometric), or a
    /// comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad t-grid {s:?}"));
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        let points = match parts.as_slice() {
            ["log", a, b, k] => {
                let (a, b) = (num(a)?, num(b)?);
                let k: usize = k.trim().parse().map_err(|_| bad())?;
                if a <= 0.0 || b <= 0.0 {
                    return Err(bad());
                }
                spaced(a.ln(), b.ln(), k)?.into_iter().map(f64::exp).collect()
            }
            [a, b, k] => {
                let k: usize = k.trim().parse().map_err(|_| bad())?;
                spaced(num(a)?, num(b)?, k)?
            }
            [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
            _ => return Err(bad()),
        };
        if points.is_empty() || points.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::arg(format!("t-grid {s:?} must be non-empty and inside (0, ∞)")));
        }
        Ok(TGrid(points))
    }
}

fn spaced(a: f64, b: f64, k: usize) -> Result<Vec<f64>> {
    match k {
        0 => Err(Error::arg("grid needs at least one point")),
        1 => Ok(vec![a]),
        _ => Ok((0..k)
            .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
            .collect()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UltraReport {
    pub c_a_float: f64,
    pub points: usize,
    /// `sup t e^{−t}/(1−e^{−2t})` over the grid.
    pub sup_profile_float: f64,
    pub argsup_float: f64,
    pub sup_in_range: bool,
    /// Profile non-increasing along the sorted grid.
    pub decreasing: bool,
    /// `C_a e^{−t}/(1−e^{−2t}) ≤ C_a/(2t)` at every point.
    pub bound_holds: bool,
    pub verdict: bool,
}

/// Checks the kernel bound against `C_a / (2t)` on the grid and that the
/// profile stays in `[1/2 − 10⁻⁶, 1/2]` at its supremum.
pub fn verify_ultracontractivity(c_a: f64, grid: &TGrid) -> Result<UltraReport> {
    if !(c_a > 0.0 && c_a.is_finite()) {
        return Err(Error::arg("C_a must be positive"));
    }
    let mut ts = grid.0.clone();
    ts.sort_by(f64::total_cmp);
    let mut sup = f64::NEG_INFINITY;
    let mut argsup = f64::NAN;
    let mut bound_holds = true;
    let mut decreasing = true;
    let mut prev = f64::INFINITY;
    for &t in &ts {
        let p = kernel_profile(t);
        if p > sup {
            sup = p;
            argsup = t;
        }
        // C_a cancels: compare profile against 1/2 rather than products of C_a
        let k = ou_kernel_bound(t, c_a)?;
        if k * t > 0.5 * c_a * (1.0 + 1e-12) {
            bound_holds = false;
        }
        if p > prev * (1.0 + 1e-15) {
            decreasing = false;
        }
        prev = p;
    }
    let sup_in_range = (0.5 - 1e-6..=0.5 + 1e-15).contains(&sup);
    Ok(UltraReport {
        c_a_float: c_a,
        points: ts.len(),
        sup_profile_float: sup,
        argsup_float: argsup,
        sup_in_range,
        decreasing,
        bound_holds,
        verdict: sup_in_range && decreasing && bound_holds,
    })
}

/// `‖h_n‖₂` for the finitely many non-zero levels of `h = Σ h_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDecomposition {
    pub levels: Vec<(u32, f64)>,
}

impl LevelDecomposition {
    pub fn new(levels: Vec<(u32, f64)>) -> Result<Self> {
        if levels.iter().any(|&(_, h)| !(h >= 0.0 && h.is_finite())) {
            return Err(Error::arg("level norms must be finite and non-negative"));
        }
        Ok(LevelDecomposition { levels })
    }

    /// `‖h‖₂ = (Σ ‖h_n‖₂²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.levels.iter().map(|&(_, h)| h * h).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelBound {
    /// `Σ C_a √n e^{−nt} ‖h_n‖₂`.
    pub level_sum_float: f64,
    /// `C_a e^{−t}/(1−e^{−2t}) ‖h‖₂`.
    pub closed_form_float: f64,
    pub holds: bool,
}

/// The level-by-level bound on `‖e^{−tN} h‖` and its Cauchy–Schwarz closed
/// form, with `(Σ_{n≥1} n e^{−2nt})^{1/2} = e^{−t}/(1−e^{−2t})`.
pub fn semigroup_level_bound(h: &LevelDecomposition, t: f64, c_a: f64) -> Result<LevelBound> {
    let closed = ou_kernel_bound(t, c_a)? * h.norm();
    let level_sum: f64 = h
        .levels
        .iter()
        .map(|&(n, hn)| c_a * (n as f64).sqrt() * (-(n as f64) * t).exp() * hn)
        .sum();
    Ok(LevelBound {
        level_sum_float: level_sum,
        closed_form_float: closed,
        holds: level_sum <= closed * (1.0 + 1e-12),
    })
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)
}

pub const QUAD_TOL: f64 = 1e-10;
pub const QUAD_DEPTH: u32 = 40;
/// Allowed deviation of `2π ∫ f` from 1.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
enum Shape {
    /// `f(r) = r / (π R²)`.
    Disc,
    /// `f(r) = 1 / (2π (R − r₀))`.
    Annulus,
    /// Linear interpolation between samples `(r, f(r))`, sorted by `r`.
    Table(Vec<(f64, f64)>),
}

/// A rotation-invariant probability measure on `r₀ ≤ |z| ≤ R` with density
/// `f(r) dr dθ`.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    inner_radius: f64,
    outer_radius: f64,
    shape: Shape,
}

impl RadialDensity {
    /// Uniform measure on the disc of radius `R`.
    pub fn uniform_disc(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::arg("disc radius must be positive"));
        }
        Ok(RadialDensity {
            inner_radius: 0.0,
            outer_radius: radius,
            shape: Shape::Disc,
        })
    }

    /// Constant radial density on `[r₀, R]`.
    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::arg("annulus needs 0 <= r0 < R"));
        }
        Ok(RadialDensity {
            inner_radius: inner,
            outer_radius: outer,
            shape: Shape::Annulus,
        })
    }

    /// Sampled density, linearly interpolated; normalization is checked.
    pub fn from_samples(mut rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::arg("density table needs at least two rows"));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::arg("density table repeats a radius"));
        }
        if rows
            .iter()
            .any(|&(r, f)| !(r >= 0.0 && r.is_finite() && f >= 0.0 && f.is_finite()))
        {
            return Err(Error::arg("density table needs r >= 0 and f(r) >= 0"));
        }
        let d = RadialDensity {
            inner_radius: rows[0].0,
            outer_radius: rows[rows.len() - 1].0,
            shape: Shape::Table(rows),
        };
        d.check_normalized()?;
        Ok(d)
    }

    /// CSV rows `r,f(r)`; a non-numeric first row is taken as a header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("row {} has {} fields", i + 1, rec.len())));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(r), Ok(f)) => rows.push((r, f)),
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("row {} is not numeric", i + 1))),
            }
        }
        Self::from_samples(rows)
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn density(&self, r: f64) -> f64 {
        if r < self.inner_radius || r > self.outer_radius {
            return 0.0;
        }
        match &self.shape {
            Shape::Disc => r / (PI * self.outer_radius * self.outer_radius),
            Shape::Annulus => 1.0 / (2.0 * PI * (self.outer_radius - self.inner_radius)),
            Shape::Table(rows) => {
                let i = rows.partition_point(|&(x, _)| x <= r).clamp(1, rows.len() - 1);
                let ((r0, f0), (r1, f1)) = (rows[i - 1], rows[i]);
                f0 + (f1 - f0) * (r - r0) / (r1 - r0)
            }
        }
    }

    /// `∫_{r₀}^{R} g(r) f(r) dr`, split at table knots.
    fn integrate(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        let knots: Vec<f64> = match &self.shape {
            Shape::Table(rows) => rows.iter().map(|&(r, _)| r).collect(),
            _ => vec![self.inner_radius, self.outer_radius],
        };
        let h = |r: f64| g(r) * self.density(r);
        knots
            .windows(2)
            .map(|w| adaptive_simpson(&h, w[0], w[1], QUAD_TOL, QUAD_DEPTH))
            .sum()
    }

    /// `2π ∫ f(r) dr`.
    pub fn total_mass(&self) -> f64 {
        2.0 * PI * self.integrate(&|_| 1.0)
    }

    fn check_normalized(&self) -> Result<()> {
        let mass = self.total_mass();
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::arg(format!(
                "density is not normalized: 2π ∫ f = {mass}"
            )));
        }
        Ok(())
    }
}

/// `sup|zⁿ| / ‖zⁿ‖_{L²(ν)} = Rⁿ / (2π ∫ r^{2n} f(r) dr)^{1/2}`, evaluated with
/// `r/R` in place of `r` to stay in range for large `n`.
pub fn brown_ratio(nu: &RadialDensity, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    nu.check_normalized()?;
    let big_r = nu.outer_radius;
    let integral = nu.integrate(&|r| (r / big_r).powi(2 * n as i32));
    Ok(1.0 / (2.0 * PI * integral).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct SqrtFit {
    pub n_min: u32,
    pub n_max: u32,
    /// Smallest and largest `brown_ratio(n)/√n` over the range.
    pub c_min_float: f64,
    pub c_max_float: f64,
    /// Geometric mean of the two; every ratio lies in `[ρ/√(c_max/c_min), ρ√(c_max/c_min)]`.
    pub rho_float: f64,
    pub spread_float: f64,
}

/// Two-sided `√n` fit of [`brown_ratio`] over `n_min..=n_max`.
pub fn sqrt_n_fit(nu: &RadialDensity, n_min: u32, n_max: u32) -> Result<SqrtFit> {
    if n_min == 0 || n_max < n_min {
        return Err(Error::arg("need 1 <= n_min <= n_max"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for n in n_min..=n_max {
        let c = brown_ratio(nu, n)? / (n as f64).sqrt();
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok(SqrtFit {
        n_min,
        n_max,
        c_min_float: lo,
        c_max_float: hi,
        rho_float: (lo * hi).sqrt(),
        spread_float: hi / lo,
    })
}
