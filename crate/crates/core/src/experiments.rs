//! Batch experiments behind the command-line runner and the acceptance suite.
//!
//! Each command returns a [`Report`]: a config echo, one tally per named
//! check, and a list of violations. Exact checks compare integers or reduced
//! rationals; numeric checks carry their tolerance in the tally.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    check_with_counts, corollary13_size_bound, is_square_distance_set, BoundReport,
};
use crate::character::{gauss_closed, gauss_direct, gauss_signs, Cpx};
use crate::error::{Error, Result};
use crate::factory::{
    exhaustive_square_distance_max, generate, greedy_square_distance_search, rng, GenSpec,
};
use crate::field::{make_field, FieldCtx, FqElem};
use crate::geometry::{distance_set, enumerate_cone, enumerate_sphere_zero, space_size, PointSet};
use crate::io::format_point_set;
use crate::pairs::{
    cone_lift_check, count_pairs, master_formula_check, predict_from_spectrum, PairCounts,
};
use crate::spectral::{
    cone_fourier_formula, dft_indicator, kernel_cache_dir_from_env, load_or_build_kernels,
    max_formula_error, numeric_masses, omega0_bound_check, rat, rat_int, rat_pow, rat_string,
    spectral_masses_exact, sphere0_fourier_formula, verify_counting_lemma, KernelTable,
    SpectralMass,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for the numeric identities, relative to their natural scale.
pub const NUMERIC_TOL: f64 = 1e-9;
/// Largest q^d for which per-set numeric transforms are computed.
pub const NUMERIC_CAP: u128 = 4096;
/// Largest q^n for the once-per-run closed-form transform checks.
pub const TRANSFORM_CAP: u128 = 20_000;
/// Largest q^d for which `analyze` builds spectral kernels.
pub const ANALYZE_SPECTRAL_CAP: u128 = 20_000;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckTally {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub check: String,
    pub subject: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub per_check: Vec<CheckTally>,
    pub violations: Vec<Violation>,
    pub results: Value,
    /// Flat table for CSV output: header then rows.
    #[serde(skip)]
    pub table: Vec<Vec<String>>,
}

impl Report {
    fn new(command: &str, config: Value) -> Report {
        Report {
            command: command.into(),
            version: VERSION.into(),
            config,
            per_check: Vec::new(),
            violations: Vec::new(),
            results: Value::Null,
            table: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.per_check.iter().all(|c| c.failed == 0)
    }

    pub fn tally(&self, name: &str) -> Option<&CheckTally> {
        self.per_check.iter().find(|c| c.name == name)
    }

    fn slot(&mut self, name: &str) -> &mut CheckTally {
        if let Some(i) = self.per_check.iter().position(|c| c.name == name) {
            return &mut self.per_check[i];
        }
        self.per_check.push(CheckTally {
            name: name.into(),
            ..Default::default()
        });
        self.per_check.last_mut().unwrap()
    }

    fn merge(&mut self, outcome: Outcome) {
        for e in outcome.entries {
            let t = self.slot(&e.check);
            if e.ok {
                t.passed += 1;
            } else {
                t.failed += 1;
            }
            if let Some((err, tol)) = e.error {
                t.max_error = Some(t.max_error.map_or(err, |m: f64| m.max(err)));
                t.tolerance = Some(tol);
            }
            if !e.ok {
                self.violations.push(Violation {
                    check: e.check,
                    subject: outcome.subject.clone(),
                    detail: e.detail,
                });
            }
        }
        self.table.extend(outcome.rows);
    }

    /// CSV rendering of [`Report::table`].
    pub fn to_csv(&self) -> String {
        self.table.iter().map(|r| r.join(",") + "\n").collect()
    }
}

struct Entry {
    check: String,
    ok: bool,
    detail: String,
    error: Option<(f64, f64)>,
}

/// Check results for one subject (a set or a run-level computation).
struct Outcome {
    subject: String,
    entries: Vec<Entry>,
    rows: Vec<Vec<String>>,
}

impl Outcome {
    fn new(subject: impl Into<String>) -> Outcome {
        Outcome {
            subject: subject.into(),
            entries: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn exact(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        let detail = if ok { String::new() } else { detail() };
        self.entries.push(Entry {
            check: check.into(),
            ok,
            detail,
            error: None,
        });
    }

    fn numeric(&mut self, check: &str, err: f64, tol: f64) {
        let ok = err < tol;
        let detail = if ok {
            String::new()
        } else {
            format!("error {err:e} exceeds {tol:e}")
        };
        self.entries.push(Entry {
            check: check.into(),
            ok,
            detail,
            error: Some((err, tol)),
        });
    }

    fn error(&mut self, check: &str, e: &Error) {
        self.entries.push(Entry {
            check: check.into(),
            ok: false,
            detail: e.to_string(),
            error: None,
        });
    }
}

fn cpx_json(z: Cpx) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn mass_json(m: &SpectralMass) -> Value {
    json!({
        "omega0": rat_string(&m.omega0),
        "omegaPlus": rat_string(&m.omega_plus),
        "omegaMinus": rat_string(&m.omega_minus),
    })
}

pub fn bound_table_header() -> Vec<String> {
    [
        "subject",
        "size",
        "sq",
        "zr",
        "nonsq",
        "statement",
        "clause",
        "branch",
        "lhs",
        "rhs",
        "slack",
        "holds",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn bound_row(subject: &str, size: usize, c: &PairCounts, r: &BoundReport) -> Vec<String> {
    let statement = serde_json::to_value(r.case.statement).unwrap();
    let branch = serde_json::to_value(r.branch).unwrap();
    let branch = match (&branch["kind"], &branch["index"]) {
        (Value::String(k), Value::Number(i)) => format!("{k}{i}"),
        (Value::String(k), _) => k.clone(),
        _ => String::new(),
    };
    vec![
        subject.into(),
        size.to_string(),
        c.sq.to_string(),
        c.zr.to_string(),
        c.nonsq.to_string(),
        statement.as_str().unwrap_or_default().into(),
        r.case.clause.to_string(),
        branch,
        rat_string(&r.lhs),
        rat_string(&r.rhs),
        rat_string(&r.slack),
        r.holds.to_string(),
    ]
}

/// Name under which a bound statement is tallied.
pub fn bound_check_name(r: &BoundReport) -> String {
    let v = serde_json::to_value(r.case.statement).unwrap();
    format!("bound.{}", v.as_str().unwrap_or("unknown"))
}

// ---------------------------------------------------------------- gauss

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GaussConfig {
    pub p: u64,
    pub ell: u32,
}

/// Direct and closed-form G_1 and the sign table for n = 2, 4, …, 12.
pub fn cmd_gauss(cfg: &GaussConfig) -> Result<Report> {
    let ctx = make_field(cfg.p, cfg.ell)?;
    let mut report = Report::new("gauss", serde_json::to_value(cfg).unwrap());
    let direct = gauss_direct(&ctx, FqElem::ONE)?;
    let closed = gauss_closed(&ctx);
    let root = (ctx.q() as f64).sqrt();
    let mut out = Outcome::new(format!("F_{}", ctx.q()));
    out.numeric(
        "gauss.closedForm",
        (direct - closed).norm(),
        NUMERIC_TOL * root,
    );

    let mut signs = Vec::new();
    for n in (2..=12u32).step_by(2) {
        let s = gauss_signs(n, &ctx)?;
        let normalized = closed.powi(n as i32) / root.powi(n as i32);
        let err = (normalized - Cpx::new(s.sigma as f64, 0.0)).norm();
        out.numeric("gauss.sigma", err, NUMERIC_TOL);
        let tau_err =
            (normalized * ctx.eta_minus_one() as f64 - Cpx::new(s.tau as f64, 0.0)).norm();
        out.numeric("gauss.tau", tau_err, NUMERIC_TOL);
        signs.push(json!({ "n": n, "sigma": s.sigma, "tau": s.tau, "normalizedPower": cpx_json(normalized) }));
    }
    report.merge(out);
    report.results = json!({
        "q": ctx.q(),
        "modulus": ctx.modulus(),
        "direct": cpx_json(direct),
        "closed": cpx_json(closed),
        "residual": (direct - closed).norm(),
        "signs": signs,
    });
    Ok(report)
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyConfig {
    pub p: u64,
    pub ell: u32,
    pub d: usize,
    pub trials: u32,
    /// Inclusive size range of the random sets; defaults to [1, q^d].
    pub min_size: Option<u64>,
    pub max_size: Option<u64>,
    pub seed: u64,
    /// Also run the structured sets (full space, lines, subspaces, sphere slices, lifts).
    pub structured: bool,
    /// Run the once-per-run closed-form transform and counting-lemma checks.
    pub transforms: bool,
}

/// Full space, lines, a coordinate subspace, whole spheres of radius 0 and 1,
/// and a lifted line.
pub fn structured_specs(d: usize) -> Vec<(String, GenSpec)> {
    let e = |i: usize| (0..d).map(|j| u64::from(j == i)).collect::<Vec<u64>>();
    let origin = vec![0u64; d];
    let mut specs = vec![
        ("fullSpace".to_string(), GenSpec::FullSpace),
        (
            "axisLine".into(),
            GenSpec::Line {
                point: origin.clone(),
                direction: e(0),
            },
        ),
        (
            "diagonalLine".into(),
            GenSpec::Line {
                point: e(d - 1),
                direction: vec![1; d],
            },
        ),
        (
            "sphere0".into(),
            GenSpec::SphereSlice {
                radius: 0,
                size: None,
                seed: 0,
            },
        ),
        (
            "sphere1".into(),
            GenSpec::SphereSlice {
                radius: 1,
                size: None,
                seed: 0,
            },
        ),
    ];
    if d >= 3 {
        specs.push((
            "coordinatePlane".into(),
            GenSpec::Subspace {
                point: origin.clone(),
                basis: vec![e(0), e(1)],
            },
        ));
    }
    if d >= 2 {
        let mut base_dir = vec![1u64; d - 1];
        base_dir[0] = 1;
        specs.push((
            "liftedLine".into(),
            GenSpec::ProductLift {
                base: Box::new(GenSpec::Line {
                    point: vec![0; d - 1],
                    direction: base_dir,
                }),
            },
        ));
    }
    specs
}

/// Every per-set check: brute-force counts, spectral prediction, cone lift,
/// mass invariants, the Ω⁰ inequality (odd d), all bounds, and for small
/// spaces the numeric DFT masses and master formula.
fn verify_set(subject: String, a: &PointSet, kernels: &KernelTable) -> Outcome {
    let mut out = Outcome::new(subject.clone());
    let ctx = a.field();
    let d = a.dim();
    let q = ctx.q();
    let counts = match count_pairs(a) {
        Ok(c) => c,
        Err(e) => {
            out.error("pairs.count", &e);
            return out;
        }
    };
    let size = a.len();
    out.exact(
        "pairs.total",
        counts.total() == (size * size) as u64,
        || format!("{} != |A|^2", counts.total()),
    );

    match spectral_masses_exact(a, kernels) {
        Ok(mass) => {
            let bad = mass.invariant_violations(size, q, d);
            out.exact("spectral.massInvariants", bad.is_empty(), || bad.join("; "));
            match predict_from_spectrum(a, &mass) {
                Ok(pred) => out.exact("spectral.prediction", pred == counts, || {
                    format!("predicted {pred:?}, counted {counts:?}")
                }),
                Err(e) => out.error("spectral.prediction", &e),
            }
            if d % 2 == 1 && d >= 3 {
                match omega0_bound_check(a, &mass) {
                    Ok(b) => out.exact("spectral.omega0Inequality", b.holds(), || {
                        format!(
                            "omega0 {} vs {} and {}",
                            rat_string(&b.omega0),
                            rat_string(&b.plancherel),
                            rat_string(&b.gauss)
                        )
                    }),
                    Err(e) => out.error("spectral.omega0Inequality", &e),
                }
            }
            if space_size(ctx, d) <= NUMERIC_CAP {
                match dft_indicator(a) {
                    Ok(t) => {
                        let nm = numeric_masses(ctx, d, &t);
                        out.numeric("numeric.masses", nm.max_abs_diff(&mass), NUMERIC_TOL);
                    }
                    Err(e) => out.error("numeric.masses", &e),
                }
            }
        }
        Err(e) => out.error("spectral.prediction", &e),
    }

    match cone_lift_check(a, &counts) {
        Ok(c) => out.exact("pairs.coneLift", c.holds(), || {
            format!(
                "cone incidences {} != q(2SQ+ZR) = {}",
                c.cone_incidences, c.predicted
            )
        }),
        Err(e) => out.error("pairs.coneLift", &e),
    }

    if space_size(ctx, d) <= NUMERIC_CAP {
        match master_formula_check(a, &counts) {
            Ok(err) => {
                let scale = (size * size).max(1) as f64;
                out.numeric("numeric.masterFormula", err, NUMERIC_TOL * scale);
            }
            Err(e) => out.error("numeric.masterFormula", &e),
        }
    }

    match check_with_counts(a, &counts) {
        Ok(reports) => {
            for r in &reports {
                out.exact(&bound_check_name(r), r.holds, || {
                    format!(
                        "clause {}: lhs {} > rhs {}",
                        r.case.clause,
                        rat_string(&r.lhs),
                        rat_string(&r.rhs)
                    )
                });
                out.rows.push(bound_row(&subject, size, &counts, r));
            }
        }
        Err(e) => out.error("bound.all", &e),
    }
    out
}

/// Closed-form cone and zero-sphere transforms against the direct DFT, and
/// the pair-counting lemma on the lift of `sample` against the cone.
fn verify_transforms(ctx: &Arc<FieldCtx>, d: usize, sample: Option<&PointSet>) -> Outcome {
    let mut out = Outcome::new("transforms");
    let n = d + 1;
    if space_size(ctx, n) <= TRANSFORM_CAP {
        match enumerate_cone(ctx, n).and_then(|c| max_formula_error(&c, cone_fourier_formula)) {
            Ok(err) => out.numeric("numeric.coneTransform", err, NUMERIC_TOL),
            Err(e) => out.error("numeric.coneTransform", &e),
        }
        if let Some(a) = sample {
            let res = a
                .product_lift()
                .and_then(|e| enumerate_cone(ctx, n).and_then(|c| verify_counting_lemma(&e, &c)));
            match res {
                Ok(c) => out.exact("numeric.countingLemma", c.agrees(), || format!("{c:?}")),
                Err(e) => out.error("numeric.countingLemma", &e),
            }
        }
    }
    if space_size(ctx, d) <= TRANSFORM_CAP {
        match enumerate_sphere_zero(ctx, d)
            .and_then(|s| max_formula_error(&s, sphere0_fourier_formula))
        {
            Ok(err) => out.numeric("numeric.sphereTransform", err, NUMERIC_TOL),
            Err(e) => out.error("numeric.sphereTransform", &e),
        }
    }
    out
}

/// The (size, generation seed) of random trial `t`.
pub fn trial_spec(seed: u64, t: u32, min: u64, max: u64) -> GenSpec {
    let mut r = rng(seed, t as u64);
    let size = r.gen_range(min..=max);
    GenSpec::Random {
        size,
        seed: r.gen(),
    }
}

pub fn cmd_verify(cfg: &VerifyConfig) -> Result<Report> {
    let ctx = make_field(cfg.p, cfg.ell)?;
    let d = cfg.d;
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let n = space_size(&ctx, d);
    let max = cfg.max_size.unwrap_or(n as u64).min(n as u64);
    let min = cfg.min_size.unwrap_or(1).max(1);
    if min > max {
        return Err(Error::SizeTooLarge {
            size: min,
            available: max,
        });
    }
    let kernels = load_or_build_kernels(&ctx, d, kernel_cache_dir_from_env().as_deref())?;
    let mut report = Report::new("verify", serde_json::to_value(cfg).unwrap());
    report.table.push(bound_table_header());

    let mut jobs: Vec<(String, GenSpec)> = (0..cfg.trials)
        .map(|t| (format!("trial{t}"), trial_spec(cfg.seed, t, min, max)))
        .collect();
    if cfg.structured {
        jobs.extend(structured_specs(d));
    }
    let outcomes: Vec<(Outcome, Option<PointSet>)> = jobs
        .par_iter()
        .map(|(name, spec)| match generate(&ctx, d, spec) {
            Ok(a) => (verify_set(name.clone(), &a, &kernels), Some(a)),
            Err(e) => {
                let mut o = Outcome::new(name.clone());
                o.error("generate", &e);
                (o, None)
            }
        })
        .collect();

    let sample = outcomes.iter().find_map(|(_, a)| a.clone());
    let mut sizes = Vec::new();
    for (o, a) in outcomes {
        sizes.push(a.map(|a| a.len()));
        report.merge(o);
    }
    if cfg.transforms {
        report.merge(verify_transforms(&ctx, d, sample.as_ref()));
    }
    report.results = json!({
        "q": ctx.q(),
        "sets": jobs.iter().zip(&sizes).map(|((name, spec), size)| json!({
            "subject": name, "spec": spec, "size": size,
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

// ---------------------------------------------------------------- analyze

/// One-set deep dive: pair counts, distance set, spectral masses and
/// prediction (small spaces), cone lift, and every bound.
pub fn cmd_analyze(a: &PointSet, source: &str) -> Result<Report> {
    let ctx = a.ctx().clone();
    let d = a.dim();
    let mut report = Report::new(
        "analyze",
        json!({ "source": source, "p": ctx.p(), "ell": ctx.ell(), "d": d, "modulus": ctx.modulus() }),
    );
    let counts = count_pairs(a)?;
    let delta: BTreeSet<FqElem> = distance_set(a)?;
    let mut results = json!({
        "size": a.len(),
        "pairCounts": counts,
        "distanceSet": delta.iter().map(|x| x.idx()).collect::<Vec<_>>(),
        "coverage": rat_string(&rat(delta.len() as u64, ctx.q())),
        "isSquareDistanceSet": counts.nonsq == 0,
        "set": format_point_set(a),
    });
    let mut out = Outcome::new(source);
    out.exact(
        "pairs.total",
        counts.total() == (a.len() * a.len()) as u64,
        || format!("{} != |A|^2", counts.total()),
    );

    if d >= 2 {
        if space_size(&ctx, d) <= ANALYZE_SPECTRAL_CAP {
            let kernels = load_or_build_kernels(&ctx, d, kernel_cache_dir_from_env().as_deref())?;
            let mass = spectral_masses_exact(a, &kernels)?;
            results["spectralMass"] = mass_json(&mass);
            let bad = mass.invariant_violations(a.len(), ctx.q(), d);
            out.exact("spectral.massInvariants", bad.is_empty(), || bad.join("; "));
            match predict_from_spectrum(a, &mass) {
                Ok(pred) => {
                    results["prediction"] = json!(pred);
                    out.exact("spectral.prediction", pred == counts, || {
                        format!("predicted {pred:?}, counted {counts:?}")
                    });
                }
                Err(e) => out.error("spectral.prediction", &e),
            }
            if d % 2 == 1 {
                let b = omega0_bound_check(a, &mass)?;
                results["omega0Inequality"] = json!({
                    "omega0": rat_string(&b.omega0),
                    "plancherel": rat_string(&b.plancherel),
                    "gauss": rat_string(&b.gauss),
                    "holds": b.holds(),
                });
                out.exact("spectral.omega0Inequality", b.holds(), || {
                    "omega0 above its bound".into()
                });
            }
        }
        if let Ok(c) = cone_lift_check(a, &counts) {
            results["coneLift"] = json!(c);
            out.exact("pairs.coneLift", c.holds(), || {
                format!(
                    "cone incidences {} != q(2SQ+ZR) = {}",
                    c.cone_incidences, c.predicted
                )
            });
        }
        let reports = check_with_counts(a, &counts)?;
        report.table.push(bound_table_header());
        for r in &reports {
            out.exact(&bound_check_name(r), r.holds, || {
                format!("lhs {} > rhs {}", rat_string(&r.lhs), rat_string(&r.rhs))
            });
            out.rows.push(bound_row(source, a.len(), &counts, r));
        }
        results["bounds"] = json!(reports);
    }
    report.merge(out);
    report.results = results;
    Ok(report)
}

// ---------------------------------------------------------------- search

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SearchStrategy {
    Greedy,
    Exhaustive,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchConfig {
    pub p: u64,
    pub ell: u32,
    pub d: usize,
    pub strategy: SearchStrategy,
    pub seed: u64,
    pub restarts: u32,
}

/// Best square-distance set found; the witness is returned alongside the report.
pub fn cmd_search_square(cfg: &SearchConfig) -> Result<(Report, PointSet)> {
    let ctx = make_field(cfg.p, cfg.ell)?;
    let d = cfg.d;
    let bound = corollary13_size_bound(d, ctx.q())?;
    let mut report = Report::new("search-square", serde_json::to_value(cfg).unwrap());
    let (witness, extra) = match cfg.strategy {
        SearchStrategy::Greedy => (
            greedy_square_distance_search(&ctx, d, cfg.seed, cfg.restarts)?,
            json!({}),
        ),
        SearchStrategy::Exhaustive => {
            let r = exhaustive_square_distance_max(&ctx, d)?;
            let extra = json!({ "exact": r.exact, "budgetExhausted": r.budget_exhausted, "nodes": r.nodes });
            (r.witness, extra)
        }
    };
    let mut out = Outcome::new("witness");
    out.exact(
        "search.isSquareDistanceSet",
        is_square_distance_set(&witness),
        || "witness has a non-square distance".into(),
    );
    let size = rat_int(witness.len() as u64);
    out.exact("search.withinBound", size <= bound, || {
        format!(
            "size {} exceeds bound {}",
            witness.len(),
            rat_string(&bound)
        )
    });
    report.merge(out);
    report.results = json!({
        "size": witness.len(),
        "bound": rat_string(&bound),
        "attainsBound": size == bound,
        "search": extra,
        "set": format_point_set(&witness),
    });
    Ok((report, witness))
}

// ---------------------------------------------------------------- coverage

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageConfig {
    pub p: u64,
    pub ell: u32,
    pub d: usize,
    pub size: u64,
    pub seeds: Vec<u64>,
}

/// True when |A| ≥ 4q^{(d+1)/2}, tested as |A|² ≥ 16 q^{d+1}.
pub fn coverage_hypothesis(q: u32, d: usize, size: u64) -> bool {
    let lhs = rat_int(size) * rat_int(size);
    lhs >= rat_int(16u32) * rat_pow(q, d as i64 + 1)
}

/// |Δ(A)|/q for seeded random sets of a fixed size. A set meeting the size
/// hypothesis whose distance set misses part of F_q is a violation.
pub fn cmd_coverage(cfg: &CoverageConfig) -> Result<Report> {
    let ctx = make_field(cfg.p, cfg.ell)?;
    let q = ctx.q();
    let hyp = coverage_hypothesis(q, cfg.d, cfg.size);
    let mut report = Report::new("coverage", serde_json::to_value(cfg).unwrap());
    report.table.push(vec![
        "seed".into(),
        "size".into(),
        "distances".into(),
        "coverage".into(),
    ]);
    let rows: Vec<Result<(u64, usize)>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let a = generate(
                &ctx,
                cfg.d,
                &GenSpec::Random {
                    size: cfg.size,
                    seed,
                },
            )?;
            Ok((seed, distance_set(&a)?.len()))
        })
        .collect();
    let mut per_seed = Vec::new();
    for r in rows {
        let (seed, count) = r?;
        let cov = count as f64 / q as f64;
        let mut out = Outcome::new(format!("seed{seed}"));
        if hyp {
            out.exact("coverage.full", count == q as usize, || {
                format!("only {count} of {q} distances")
            });
        }
        out.rows.push(vec![
            seed.to_string(),
            cfg.size.to_string(),
            count.to_string(),
            cov.to_string(),
        ]);
        report.merge(out);
        per_seed.push(json!({ "seed": seed, "distances": count, "coverage": cov }));
    }
    report.results = json!({ "q": q, "hypothesisMet": hyp, "perSeed": per_seed });
    Ok(report)
}
