//! Command-line front end.
//!
//! Every subcommand writes one JSON document (or CSV table) and reports a
//! verdict. Exit status: 0 when every verdict passes, 1 when one fails, 2
//! when a size ceiling would be exceeded, 3 on bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bijection::{phi_map, q_map};
use crate::cumulants::{mixed_moment, ParticleTensor, StarWord};
use crate::exact::{format_rational, Rational};
use crate::haagerup::{
    circular_closed_form_check, domination_holds, fuss_catalan_root, haagerup_constant,
    sharpness_haar, verify_main_lemma_with, verify_strong_haagerup_with, InequalityReport,
    MomentEngine,
};
use crate::models::{
    self, chebyshev_moment_oracle, cumulant_growth_bound, dominating_model,
    free_group_moment_oracle, RDiagonalModel, DEFAULT_K_MAX,
};
use crate::partitions::{catalan, enumerate_multichains, enumerate_nc, fuss_catalan, Limits};
use crate::patterns::{
    enumerate_alternating_partitions, enumerate_no_intrablock_pairings, enumerate_star_pairings,
};
use crate::spectral::{
    brown_ratio, kernel_profile, ou_kernel_bound, sqrt_n_fit, verify_ultracontractivity,
    RadialDensity, TGrid,
};
use crate::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_SIZE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "freehaag", version, about = "Exact non-crossing combinatorics and Haagerup-inequality checks")]
pub struct Cli {
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Emit CSV tables instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pub csv: bool,
    /// Emit JSON (default).
    #[arg(long, global = true)]
    pub json: bool,
    /// Cumulant truncation order for built-in models.
    #[arg(long, global = true, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalan / Fuss-Catalan numbers and enumeration counts.
    Count(CountArgs),
    /// Stream a partition family.
    Enumerate(EnumerateArgs),
    /// Apply the ∗-pairing / multichain bijection.
    Bijection(BijectionArgs),
    /// Moments from cumulants, mixed moments, or particle moments.
    Moment(MomentArgs),
    /// Main-lemma and strong Haagerup checks for particle tensors.
    Haagerup(HaagerupArgs),
    /// `‖u₁+…+u_k‖₂ₘ` for free Haar unitaries.
    Sharpness(SharpnessArgs),
    /// Ornstein-Uhlenbeck kernel bound on a grid of times.
    Ultra(UltraArgs),
    /// Radial Brown-measure ratio `‖zⁿ‖_∞/‖zⁿ‖₂`.
    Brown(BrownArgs),
    /// Independent oracles.
    Oracle(OracleArgs),
    /// A fixed battery of checks, seeded; used for reproducibility runs.
    Suite(SuiteArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("family").required(true).multiple(false)))]
pub struct CountArgs {
    #[arg(long, group = "family")]
    pub catalan: bool,
    #[arg(long, group = "family")]
    pub fuss_catalan: bool,
    /// Enumerate `NC(n)`.
    #[arg(long, group = "family")]
    pub nc: bool,
    #[arg(long, group = "family")]
    pub star_pairings: bool,
    #[arg(long, group = "family")]
    pub alternating: bool,
    #[arg(long, group = "family")]
    pub no_intrablock: bool,
    #[arg(long, group = "family")]
    pub multichains: bool,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Nc,
    StarPairings,
    Alternating,
    NoIntrablock,
    Multichains,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Forward,
    Backward,
    Roundtrip,
}

#[derive(Debug, Args)]
pub struct BijectionArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = Direction::Roundtrip)]
    pub direction: Direction,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// `circular`, `haar`, `b:GAMMA:LAMBDA`, or a model JSON file.
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Star word such as `"1 2* 1 2*"`, for a mixed moment of free copies.
    #[arg(long, conflicts_with = "tensor")]
    pub word: Option<String>,
    /// Particle tensor JSON file.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    MainLemma,
    Strong,
    Both,
}

#[derive(Debug, Args)]
pub struct HaagerupArgs {
    #[arg(long)]
    pub model: String,
    /// Particle tensor JSON file; without it a seeded random corpus is used.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub m_max: usize,
    #[arg(long, value_enum, default_value_t = Check::Both)]
    pub check: Check,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random tensors to draw when no file is given.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Largest particle number for random tensors.
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub m_max: usize,
}

#[derive(Debug, Args)]
pub struct UltraArgs {
    #[arg(long = "Ca", default_value_t = 1.0)]
    pub c_a: f64,
    /// `start:stop:count`, `log:start:stop:count`, or `t1,t2,…`.
    #[arg(long, default_value = "log:1e-6:10:1000")]
    pub t_grid: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    Disc,
    Annulus,
    File,
}

#[derive(Debug, Args)]
pub struct BrownArgs {
    #[arg(long, value_enum)]
    pub density: DensityKind,
    #[arg(long)]
    pub n: u32,
    /// Outer radius for `disc` and `annulus`.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Inner radius for `annulus`.
    #[arg(long, default_value_t = 0.5)]
    pub inner: f64,
    /// CSV of `r,f(r)` rows for `file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Also fit `ratio/√k` for `k` in `n_min..=n`.
    #[arg(long)]
    pub fit_from: Option<u32>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub which: OracleKind,
}

#[derive(Debug, Subcommand)]
pub enum OracleKind {
    /// `φ(w)` for free Haar unitaries by word reduction, compared with cumulants.
    FreeGroup {
        #[arg(long)]
        word: String,
    },
    /// `φ(P_n(s)^{2m})`, compared with the count of no-intrablock pairings.
    Chebyshev {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random tensors per model.
    #[arg(long, default_value_t = 5)]
    pub tensors: usize,
}

/// Output of one subcommand: a JSON document, optional CSV, and a verdict.
pub struct Outcome {
    pub json: Value,
    pub csv: Option<String>,
    pub verdict: bool,
}

impl Outcome {
    fn json(json: Value, verdict: bool) -> Self {
        Outcome {
            json,
            csv: None,
            verdict,
        }
    }
}

fn q(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn count_cmd(a: &CountArgs, limits: &Limits) -> Result<Outcome> {
    let (n, m) = (a.n, a.m);
    let n64 = n as u64;
    let m64 = m as u64;
    let (family, count, formula): (&str, BigInt, Option<BigInt>) = if a.catalan {
        ("catalan", catalan(n64), None)
    } else if a.fuss_catalan {
        if n == 0 || m == 0 {
            return Err(Error::arg("fuss-catalan needs n, m >= 1"));
        }
        ("fuss_catalan", fuss_catalan(n64, m64), None)
    } else if a.nc {
        ("nc", enumerate_nc(n, limits)?.count().into(), Some(catalan(n64)))
    } else if a.star_pairings {
        let c = enumerate_star_pairings(n, m, limits)?.count();
        ("star_pairings", c.into(), Some(fuss_catalan(n64, m64)))
    } else if a.alternating {
        ("alternating", enumerate_alternating_partitions(n, m, limits)?.count().into(), None)
    } else if a.no_intrablock {
        let c = enumerate_no_intrablock_pairings(n, m, limits)?.count();
        ("no_intrablock", c.into(), Some(chebyshev_moment_oracle(n, m)))
    } else {
        let c = enumerate_multichains(n, m, limits)?.count();
        ("multichains", c.into(), Some(fuss_catalan(n64, m64)))
    };
    let verdict = formula.as_ref().is_none_or(|f| f == &count);
    let mut j = json!({"family": family, "n": n, "m": m, "count": big(&count), "verdict": verdict});
    if let Some(f) = &formula {
        j["formula"] = big(f);
    }
    Ok(Outcome::json(j, verdict))
}

fn enumerate_cmd(a: &EnumerateArgs, limits: &Limits) -> Result<Outcome> {
    let (n, m) = (a.n, a.m);
    let items: Vec<String> = match a.family {
        Family::Nc => enumerate_nc(n, limits)?.map(|p| p.to_string()).collect(),
        Family::StarPairings => enumerate_star_pairings(n, m, limits)?
            .map(|p| p.partition().to_string())
            .collect(),
        Family::Alternating => enumerate_alternating_partitions(n, m, limits)?
            .map(|p| p.to_string())
            .collect(),
        Family::NoIntrablock => enumerate_no_intrablock_pairings(n, m, limits)?
            .map(|p| p.to_string())
            .collect(),
        Family::Multichains => enumerate_multichains(n, m, limits)?
            .map(|c| c.to_string())
            .collect(),
    };
    let csv = csv_table(&["index", "item"], items
        .iter()
        .enumerate()
        .map(|(i, s)| vec![(i + 1).to_string(), s.clone()])
        .collect())?;
    let family = to_value(&a.family.to_possible_value().map(|v| v.get_name().to_string()));
    Ok(Outcome {
        json: json!({"family": family, "n": n, "m": m, "count": items.len(), "items": items, "verdict": true}),
        csv: Some(csv),
        verdict: true,
    })
}

fn bijection_cmd(a: &BijectionArgs, limits: &Limits) -> Result<Outcome> {
    let mut records = Vec::new();
    let mut verdict = true;
    match a.direction {
        Direction::Forward | Direction::Roundtrip => {
            for pi in enumerate_star_pairings(a.n, a.m, limits)? {
                let chain = phi_map(&pi)?;
                let mut r = json!({"pairing": pi.partition().to_string(), "chain": chain.text_forms()});
                if a.direction == Direction::Roundtrip {
                    let back = q_map(&chain)?;
                    let ok = back == pi;
                    verdict &= ok;
                    r["pairing_roundtrip"] = json!(ok);
                    let again = phi_map(&back)?;
                    let ok2 = again == chain;
                    verdict &= ok2;
                    r["chain_roundtrip"] = json!(ok2);
                }
                records.push(r);
            }
            if a.direction == Direction::Roundtrip {
                for chain in enumerate_multichains(a.n, a.m, limits)? {
                    let ok = phi_map(&q_map(&chain)?)? == chain;
                    verdict &= ok;
                }
            }
        }
        Direction::Backward => {
            for chain in enumerate_multichains(a.n, a.m, limits)? {
                let pi = q_map(&chain)?;
                records.push(json!({"chain": chain.text_forms(), "pairing": pi.partition().to_string()}));
            }
        }
    }
    let direction = a.direction.to_possible_value().map(|v| v.get_name().to_string());
    Ok(Outcome::json(
        json!({"n": a.n, "m": a.m, "direction": direction, "count": records.len(), "records": records, "verdict": verdict}),
        verdict,
    ))
}

fn read_tensor(path: &std::path::Path) -> Result<ParticleTensor> {
    ParticleTensor::from_json(&std::fs::read_to_string(path)?)
}

fn model_header(model: &RDiagonalModel) -> Value {
    json!({
        "name": model.name,
        "experimental": model.is_experimental(),
        "two_norm_sq": q(&model.two_norm_sq),
        "op_norm": model.op_norm.as_ref().map(to_value),
    })
}

fn moment_cmd(a: &MomentArgs, k_max: usize, limits: &Limits) -> Result<Outcome> {
    let model = models::resolve(&a.model, k_max)?;
    let header = model_header(&model);
    if let Some(w) = &a.word {
        let word: StarWord = w.parse()?;
        let size = word.letters().iter().map(|l| l.index + 1).max().unwrap_or(1);
        let family = vec![model.seq.clone(); size];
        let v = mixed_moment(&family, &word, limits)?;
        return Ok(Outcome::json(
            json!({"model": header, "word": word.to_string(), "value": q(&v), "verdict": true}),
            true,
        ));
    }
    let m = a.m.ok_or_else(|| Error::arg("--m is required"))?;
    if let Some(path) = &a.tensor {
        let t = read_tensor(path)?;
        let engine = MomentEngine::new(&model, *limits);
        let v = engine.particle_moment(&t, m)?;
        let two = crate::cumulants::two_norm_sq(&model.seq, &t)?;
        return Ok(Outcome::json(
            json!({"model": header, "n": t.n(), "m": m, "value": q(&v), "two_norm_sq": q(&two), "verdict": true}),
            true,
        ));
    }
    let n = a.n.ok_or_else(|| Error::arg("--n is required"))?;
    let v = crate::cumulants::moment_from_cumulants(&model.seq, n, m, limits)?;
    let fc = Rational::from_integer(fuss_catalan(n as u64, m as u64));
    let mut j = json!({"model": header, "n": n, "m": m, "value": q(&v), "verdict": true});
    if v == fc {
        j["annotation"] = json!(format!("{} = C^{{({n})}}_{m}", fc.to_integer()));
    }
    Ok(Outcome::json(j, true))
}

fn report_csv(reports: &[(usize, InequalityReport)]) -> Result<String> {
    let mut out = String::new();
    for (i, (idx, r)) in reports.iter().enumerate() {
        let table = r.to_csv()?;
        for (l, line) in table.lines().enumerate() {
            if l == 0 {
                if i == 0 {
                    out.push_str(&format!("tensor,kind,{line}\n"));
                }
                continue;
            }
            out.push_str(&format!("{idx},{},{line}\n", r.kind));
        }
    }
    Ok(out)
}

fn haagerup_reports(
    model: &RDiagonalModel,
    tensors: &[ParticleTensor],
    m_max: usize,
    check: Check,
    limits: &Limits,
) -> Result<Vec<(usize, InequalityReport)>> {
    let engine = MomentEngine::new(model, *limits);
    let per: Vec<Result<Vec<(usize, InequalityReport)>>> = tensors
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut v = Vec::new();
            if matches!(check, Check::MainLemma | Check::Both) {
                v.push((i, verify_main_lemma_with(&engine, t, m_max)?));
            }
            if matches!(check, Check::Strong | Check::Both) {
                v.push((i, verify_strong_haagerup_with(&engine, t, m_max)?));
            }
            Ok(v)
        })
        .collect();
    let mut all = Vec::new();
    for r in per {
        all.extend(r?);
    }
    Ok(all)
}

fn haagerup_cmd(a: &HaagerupArgs, k_max: usize, limits: &Limits) -> Result<Outcome> {
    let model = models::resolve(&a.model, k_max)?;
    let (tensors, seed) = match &a.tensor {
        Some(p) => (vec![read_tensor(p)?], None),
        None => (ParticleTensor::corpus(a.seed, a.count, a.n_max)?, Some(a.seed)),
    };
    let reports = haagerup_reports(&model, &tensors, a.m_max, a.check, limits)?;
    let verdict = reports.iter().all(|(_, r)| r.verdict);
    let csv = report_csv(&reports)?;
    let list: Vec<Value> = reports
        .iter()
        .map(|(i, r)| {
            let mut v = to_value(r);
            v["tensor"] = json!(i);
            v
        })
        .collect();
    Ok(Outcome {
        json: json!({
            "model": model_header(&model),
            "constant": to_value(&haagerup_constant(&model)?),
            "seed": seed,
            "tensors": tensors.len(),
            "m_max": a.m_max,
            "reports": list,
            "verdict": verdict,
        }),
        csv: Some(csv),
        verdict,
    })
}

fn sharpness_cmd(a: &SharpnessArgs, k_max: usize, limits: &Limits) -> Result<Outcome> {
    let haar = models::haar_unitary(k_max);
    let r = sharpness_haar(&haar, a.k, a.m_max, limits)?;
    let csv = csv_table(
        &["m", "moment", "norm_float", "target_float"],
        r.rows
            .iter()
            .map(|row| {
                vec![
                    row.m.to_string(),
                    format_rational(&row.moment),
                    format!("{:e}", row.norm_float),
                    format!("{:e}", r.target_float),
                ]
            })
            .collect(),
    )?;
    Ok(Outcome {
        verdict: r.verdict,
        json: to_value(&r),
        csv: Some(csv),
    })
}

fn ultra_cmd(a: &UltraArgs) -> Result<Outcome> {
    let grid: TGrid = a.t_grid.parse()?;
    let r = verify_ultracontractivity(a.c_a, &grid)?;
    let mut rows = Vec::with_capacity(grid.0.len());
    for &t in &grid.0 {
        rows.push(vec![
            format!("{t:e}"),
            format!("{:e}", kernel_profile(t)),
            format!("{:e}", ou_kernel_bound(t, a.c_a)?),
            format!("{:e}", 0.5 * a.c_a / t),
        ]);
    }
    let csv = csv_table(&["t_float", "profile_float", "kernel_float", "target_float"], rows)?;
    Ok(Outcome {
        verdict: r.verdict,
        json: to_value(&r),
        csv: Some(csv),
    })
}

fn brown_cmd(a: &BrownArgs) -> Result<Outcome> {
    let density = match a.density {
        DensityKind::Disc => RadialDensity::uniform_disc(a.radius)?,
        DensityKind::Annulus => RadialDensity::annulus(a.inner, a.radius)?,
        DensityKind::File => {
            let path = a
                .file
                .as_ref()
                .ok_or_else(|| Error::Parse("--file is required for --density file".into()))?;
            RadialDensity::from_csv(path)?
        }
    };
    let ratio = brown_ratio(&density, a.n)?;
    let mut verdict = true;
    let mut j = json!({
        "density": a.density.to_possible_value().map(|v| v.get_name().to_string()),
        "inner_radius_float": density.inner_radius(),
        "outer_radius_float": density.outer_radius(),
        "n": a.n,
        "ratio_float": ratio,
    });
    if a.density == DensityKind::Disc {
        let expected = f64::from(a.n + 1);
        let ok = (ratio * ratio - expected).abs() < 1e-6;
        verdict &= ok;
        j["closed_form_float"] = json!(expected.sqrt());
    }
    let mut rows = vec![vec![a.n.to_string(), format!("{ratio:e}")]];
    if let Some(from) = a.fit_from {
        let fit = sqrt_n_fit(&density, from, a.n)?;
        verdict &= fit.spread_float < 4.0;
        rows = (from..=a.n)
            .map(|k| Ok(vec![k.to_string(), format!("{:e}", brown_ratio(&density, k)?)]))
            .collect::<Result<_>>()?;
        j["fit"] = to_value(&fit);
    }
    j["verdict"] = json!(verdict);
    Ok(Outcome {
        json: j,
        csv: Some(csv_table(&["n", "ratio_float"], rows)?),
        verdict,
    })
}

fn oracle_cmd(a: &OracleArgs, k_max: usize, limits: &Limits) -> Result<Outcome> {
    match &a.which {
        OracleKind::FreeGroup { word } => {
            let w: StarWord = word.parse()?;
            let oracle = free_group_moment_oracle(&w);
            let size = w.letters().iter().map(|l| l.index + 1).max().unwrap_or(1);
            let family = vec![models::haar_unitary(k_max).seq; size];
            let via = mixed_moment(&family, &w, limits)?;
            let ok = via == oracle;
            Ok(Outcome::json(
                json!({"word": w.to_string(), "oracle": q(&oracle), "cumulants": q(&via), "verdict": ok}),
                ok,
            ))
        }
        OracleKind::Chebyshev { n, m } => {
            let v = chebyshev_moment_oracle(*n, *m);
            let mut j = json!({"n": n, "m": m, "value": big(&v)});
            let mut ok = true;
            match enumerate_no_intrablock_pairings(*n, *m, limits) {
                Ok(it) => {
                    let c = BigInt::from(it.count());
                    ok = c == v;
                    j["no_intrablock_count"] = big(&c);
                }
                Err(Error::Size { .. }) => {}
                Err(e) => return Err(e),
            }
            j["root_float"] = json!(crate::haagerup::int_root(&v, 2 * m));
            j["verdict"] = json!(ok);
            Ok(Outcome::json(j, ok))
        }
    }
}

/// A fixed battery touching every module; the output depends only on the
/// arguments, never on the thread count.
fn suite_cmd(a: &SuiteArgs, k_max: usize, limits: &Limits) -> Result<Outcome> {
    let mut sections = serde_json::Map::new();
    let mut verdict = true;
    let mut record = |name: &str, v: Value, ok: bool| {
        verdict &= ok;
        sections.insert(name.to_string(), json!({"verdict": ok, "data": v}));
    };

    let mut fc = Vec::new();
    let mut ok = true;
    for n in 1..=4usize {
        for m in 1..=8 / n {
            let c = BigInt::from(enumerate_star_pairings(n, m, limits)?.count());
            let f = fuss_catalan(n as u64, m as u64);
            ok &= c == f;
            fc.push(json!({"n": n, "m": m, "count": big(&c)}));
        }
    }
    record("fuss_catalan", Value::Array(fc), ok);

    let mut ok = true;
    let mut pairs = 0;
    for (n, m) in [(1, 4), (2, 2), (2, 3), (3, 2)] {
        for pi in enumerate_star_pairings(n, m, limits)? {
            ok &= q_map(&phi_map(&pi)?)? == pi;
            pairs += 1;
        }
    }
    record("bijection", json!({"pairings": pairs}), ok);

    let circ = models::circular(k_max);
    let haar = models::haar_unitary(k_max);
    let b11 = models::b_model(&Rational::from_integer(1.into()), &Rational::from_integer(1.into()), k_max)?;
    let mut moments = Vec::new();
    let mut ok = true;
    for (n, m) in [(1, 3), (2, 2), (2, 3), (3, 2)] {
        let c = crate::cumulants::moment_from_cumulants(&circ.seq, n, m, limits)?;
        let h = crate::cumulants::moment_from_cumulants(&haar.seq, n, m, limits)?;
        ok &= c == Rational::from_integer(fuss_catalan(n as u64, m as u64)) && h == Rational::from_integer(1.into());
        moments.push(json!({"n": n, "m": m, "circular": q(&c), "haar": q(&h)}));
    }
    record("moments", Value::Array(moments), ok);

    let tensors = ParticleTensor::corpus(a.seed, a.tensors, 3)?;
    for model in [&circ, &haar, &b11] {
        let reports = haagerup_reports(model, &tensors, 3, Check::Both, limits)?;
        let ok = reports.iter().all(|(_, r)| r.verdict);
        let summary: Vec<Value> = reports
            .iter()
            .map(|(i, r)| {
                json!({
                    "tensor": i,
                    "kind": r.kind,
                    "lhs_power": r.rows.iter().map(|row| q(&row.lhs_power)).collect::<Vec<_>>(),
                    "slack_float": r.rows.iter().map(|row| row.slack_float).collect::<Vec<_>>(),
                })
            })
            .collect();
        record(&format!("haagerup_{}", model.name), Value::Array(summary), ok);
    }

    let dom = dominating_model(&haar)?;
    let growth = cumulant_growth_bound(&dom, dom.seq.k_max().min(10))?;
    let mut ok = growth.verdict;
    let mut chain = Vec::new();
    for (n, m) in [(1, 2), (2, 2), (1, 4), (2, 3)] {
        let (lhs, rhs, holds) = domination_holds(&haar, &dom, n, m, limits)?;
        ok &= holds;
        chain.push(json!({"n": n, "m": m, "abs_sum": q(&lhs), "dominating_moment": q(&rhs)}));
    }
    record("domination", json!({"params": to_value(&dom.b_params), "chain": chain}), ok);

    let mut sharp = Vec::new();
    let mut ok = true;
    for k in 2..=4 {
        let r = sharpness_haar(&haar, k, 3, limits)?;
        ok &= r.verdict;
        sharp.push(to_value(&r));
    }
    record("sharpness", Value::Array(sharp), ok);

    let (fails, checked) = circular_closed_form_check(10, 50);
    let ok = fails.is_empty();
    record("circular_closed_form", json!({"checked": checked, "failures": to_value(&fails)}), ok);

    let limit = fuss_catalan_root(3, 200);
    let rel = ((limit - 256.0 / 27.0) / (256.0 / 27.0)).abs();
    record(
        "norm_limit",
        json!({"root_float": limit, "target_float": 256.0 / 27.0, "relative_error_float": rel}),
        rel < 0.02,
    );

    let u = verify_ultracontractivity(1.0, &"log:1e-8:10:2000".parse()?)?;
    let ok = u.verdict;
    record("ultracontractivity", to_value(&u), ok);

    let disc = RadialDensity::uniform_disc(1.0)?;
    let ratios: Vec<f64> = (1..=10).map(|n| brown_ratio(&disc, n)).collect::<Result<_>>()?;
    let ok = ratios
        .iter()
        .enumerate()
        .all(|(i, r)| (r * r - (i + 2) as f64).abs() < 1e-6);
    record("brown_disc", json!(ratios), ok);

    Ok(Outcome::json(
        json!({"seed": a.seed, "tensors": a.tensors, "sections": sections, "verdict": verdict}),
        verdict,
    ))
}

fn dispatch(cli: &Cli, limits: &Limits) -> Result<Outcome> {
    match &cli.command {
        Command::Count(a) => count_cmd(a, limits),
        Command::Enumerate(a) => enumerate_cmd(a, limits),
        Command::Bijection(a) => bijection_cmd(a, limits),
        Command::Moment(a) => moment_cmd(a, cli.k_max, limits),
        Command::Haagerup(a) => haagerup_cmd(a, cli.k_max, limits),
        Command::Sharpness(a) => sharpness_cmd(a, cli.k_max, limits),
        Command::Ultra(a) => ultra_cmd(a),
        Command::Brown(a) => brown_cmd(a),
        Command::Oracle(a) => oracle_cmd(a, cli.k_max, limits),
        Command::Suite(a) => suite_cmd(a, cli.k_max, limits),
    }
}

/// Runs a parsed command on a dedicated thread pool and writes its output.
pub fn run(cli: &Cli, limits: &Limits, out: &mut dyn Write) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| dispatch(cli, limits))?;
    if cli.csv {
        let table = outcome
            .csv
            .ok_or_else(|| Error::arg("this subcommand has no CSV form"))?;
        out.write_all(table.as_bytes())?;
    } else {
        let text = serde_json::to_string_pretty(&outcome.json)?;
        writeln!(out, "{text}")?;
    }
    Ok(outcome.verdict)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Size { .. } => EXIT_SIZE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    let limits = match Limits::from_env() {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    match run(&cli, &limits, out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["freehaag"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn count_star_pairings() {
        let (code, out) = run_args(&["count", "--star-pairings", "--n", "3", "--m", "4"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], "140");
    }

    #[test]
    fn moment_annotation() {
        let (code, out) = run_args(&["moment", "--model", "circular", "--n", "2", "--m", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], "12/1");
        assert_eq!(v["annotation"], "12 = C^{(2)}_3");
    }

    #[test]
    fn bijection_roundtrip() {
        let (code, out) = run_args(&["bijection", "--n", "2", "--m", "2", "--direction", "roundtrip"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], 3);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["enumerate", "--family", "nc", "--n", "40"]).0, EXIT_SIZE);
        assert_eq!(run_args(&["moment", "--model", "nope", "--n", "1", "--m", "1"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["count"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--csv", "count", "--nc", "--n", "3"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--help"]).0, EXIT_PASS);
    }
}
