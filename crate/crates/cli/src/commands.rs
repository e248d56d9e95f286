//! One function per subcommand. Each returns its checks, a JSON result
//! block and any extra files.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use sbforms_core::domain::{HalfPlanePoint, Region};
use sbforms_core::fourier::{
    expand, koecher_check, liouville_bound_check, synthesize, CoefficientEntry, FourierMode, ZERO_FREQUENCY_TOL,
};
use sbforms_core::grassmann::MultiIndex;
use sbforms_core::measure::measure_check;
use sbforms_core::sampling::random_member;
use sbforms_core::satake::{classify, ls_norm, tail_dichotomy, ClassifierVerdict, Diagnostic, GrowthProfile, NormOptions, NormReport};
use sbforms_core::superfunc::{Component, SuperFunction};

use crate::job::{ExpansionParams, MeasureParams, SatakeParams, Suite, VerifyParams, VerifyTolerances};
use crate::plot::{Plot, Series};
use crate::suites::{cayley_suite, identity_suite, Check};
use crate::{CliError, Command, Context, Outcome};

fn schema<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Schema(msg.into()))
}

fn parse<T: DeserializeOwned>(params: Value) -> Result<T, CliError> {
    serde_json::from_value(params).map_err(|e| CliError::Schema(format!("params: {e}")))
}

pub fn dispatch(command: Command, params: Value, ctx: Context) -> Result<Outcome, CliError> {
    match command {
        Command::Verify => verify(parse(params)?, ctx),
        Command::FourierExpand => fourier_expand(parse(params)?, ctx),
        Command::KoecherCheck => koecher(parse(params)?, ctx),
        Command::SatakeClassify => satake_classify(parse(params)?, ctx),
        Command::MeasureCheck => measure(parse(params)?, ctx),
    }
}

pub fn verify(mut p: VerifyParams, ctx: Context) -> Result<Outcome, CliError> {
    if let Some(t) = ctx.tol {
        p.tolerances = VerifyTolerances::uniform(t);
    }
    if p.n == 0 {
        return schema("n must be positive");
    }
    let mut checks = Vec::new();
    if p.suites.contains(&Suite::Identity) {
        checks.extend(identity_suite(&p, ctx.seed)?);
    }
    if p.suites.contains(&Suite::Cayley) {
        checks.extend(cayley_suite(&p, ctx.seed)?);
    }
    Ok(Outcome {
        tolerances: serde_json::to_value(p.tolerances)?,
        checks,
        result: json!({
            "n": p.n,
            "r": p.r,
            "triples": p.triples,
            "points": p.points,
            "t_max": p.t_max,
            "weight": p.weight,
            "suites": p.suites,
        }),
        files: Vec::new(),
    })
}

/// The cusp function of an expansion job, with its modes when given as such.
fn expansion_source(p: &ExpansionParams) -> Result<(SuperFunction, Option<Vec<FourierMode>>), CliError> {
    match (&p.modes, &p.function) {
        (Some(specs), None) => {
            let modes = specs.iter().map(|s| s.build(p.n)).collect::<Result<Vec<_>, _>>()?;
            Ok((synthesize(p.n, p.r, p.k, &modes)?, Some(modes)))
        }
        (None, Some(spec)) => {
            if (spec.n, spec.r, spec.weight) != (p.n, p.r, p.k) {
                return schema(format!(
                    "function has (n, r, weight) = ({}, {}, {}), job has ({}, {}, {})",
                    spec.n, spec.r, spec.weight, p.n, p.r, p.k
                ));
            }
            Ok((spec.build()?, None))
        }
        _ => schema("exactly one of `modes` and `function` is required"),
    }
}

fn window(p: &ExpansionParams) -> Result<RangeInclusive<i64>, CliError> {
    match p.window {
        [a, b] if a <= b => Ok(a..=b),
        [a, b] => schema(format!("empty window [{a}, {b}]")),
    }
}

fn bases(p: &ExpansionParams) -> Result<Vec<HalfPlanePoint>, CliError> {
    Ok(p.bases.iter().map(|b| HalfPlanePoint::new(b.clone())).collect::<Result<Vec<_>, _>>()?)
}

/// NaN-safe running maximum.
fn worst(acc: f64, v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        acc.max(v)
    }
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "I")]
    index: String,
    m: f64,
    base_re: f64,
    base_im: f64,
    value_re: f64,
    value_im: f64,
}

/// One row per entry; `base` is the `w₁` coordinate of the base point.
fn coefficients_csv(entries: &[CoefficientEntry]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in entries {
        w.serialize(CsvRow {
            index: e.index.to_string(),
            m: e.m,
            base_re: e.base[0].re,
            base_im: e.base[0].im,
            value_re: e.value.re,
            value_im: e.value.im,
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    if entries.is_empty() {
        w.write_record(["I", "m", "base_re", "base_im", "value_re", "value_im"])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn coefficient_plot(entries: &[CoefficientEntry]) -> String {
    let first = &entries[0].base;
    let mut by_index: BTreeMap<MultiIndex, Vec<(f64, f64)>> = BTreeMap::new();
    for e in entries.iter().filter(|e| &e.base == first) {
        by_index.entry(e.index).or_default().push((e.m, e.coefficient().norm()));
    }
    Plot {
        title: "coefficient magnitudes at the first base point".into(),
        x_label: "m".into(),
        y_label: "|c_{I,m}|".into(),
        log_x: false,
        log_y: true,
        series: by_index
            .into_iter()
            .map(|(index, points)| Series {
                label: format!("I = {index}"),
                points,
                joined: false,
            })
            .collect(),
    }
    .to_svg()
}

pub fn fourier_expand(mut p: ExpansionParams, ctx: Context) -> Result<Outcome, CliError> {
    if let Some(t) = ctx.tol {
        p.tol = t;
    }
    let (q, modes) = expansion_source(&p)?;
    let window = window(&p)?;
    let bases = bases(&p)?;
    let entries = expand(&q, &p.cusp, window.clone(), &bases, p.quad_points)?;

    let mut checks = Vec::new();
    if let Some(modes) = &modes {
        let mut expected: BTreeMap<(MultiIndex, i64), Vec<&FourierMode>> = BTreeMap::new();
        let mut unresolved = 0;
        for mode in modes {
            match p.cusp.lattice_label(mode.index, p.k, mode.m)? {
                Some(label) if window.contains(&label) => expected.entry((mode.index, label)).or_default().push(mode),
                _ => unresolved += 1,
            }
        }
        let (mut recovery, mut leak, mut used, mut unused) = (0.0, 0.0, 0, 0);
        for e in &entries {
            let want = match expected.get(&(e.index, e.label)) {
                Some(ms) => ms.iter().map(|m| m.c.eval(&e.base[1..])).sum::<Result<Complex64, _>>()?,
                None => Complex64::new(0.0, 0.0),
            };
            if want.norm() > 0.0 {
                recovery = worst(recovery, (e.coefficient() - want).norm() / want.norm());
                used += 1;
            } else {
                leak = worst(leak, e.value.norm());
                unused += 1;
            }
        }
        checks.push(Check::new(
            "modes_on_window_lattice",
            unresolved as f64,
            0.0,
            modes.len(),
            unresolved == 0,
        ));
        checks.push(Check::below("coefficient_recovery", recovery, p.tol, used));
        checks.push(Check::below("unused_slots", leak, p.tol, unused));
    }

    let mut files = vec![("coefficients.csv".to_string(), coefficients_csv(&entries)?)];
    if ctx.plot && !entries.is_empty() {
        files.push(("coefficients.svg".to_string(), coefficient_plot(&entries).into_bytes()));
    }
    Ok(Outcome {
        tolerances: json!({ "tol": p.tol, "zero_frequency_tol": ZERO_FREQUENCY_TOL }),
        checks,
        result: json!({
            "quad_points": p.quad_points,
            "window": p.window,
            "coefficients": entries,
        }),
        files,
    })
}

pub fn koecher(mut p: ExpansionParams, ctx: Context) -> Result<Outcome, CliError> {
    if let Some(t) = ctx.tol {
        p.tol = t;
    }
    let (q, _) = expansion_source(&p)?;
    let report = koecher_check(&q, &p.cusp, window(&p)?, &bases(&p)?, p.tol, p.quad_points)?;
    for o in &report.offending {
        eprintln!("offending mode: I = {} m = {} |c| = {:e}", o.index, o.m, o.magnitude);
    }
    let spread = report.constant_terms.iter().map(|c| c.spread).fold(0.0, worst);
    let mut checks = vec![
        Check::new(
            "positive_frequencies_vanish",
            report.max_positive,
            p.tol,
            report.offending.len(),
            report.offending.is_empty(),
        ),
        Check::new(
            "constant_terms_constant",
            spread,
            p.tol,
            report.constant_terms.len(),
            report.constant_terms.iter().all(|c| c.constant),
        ),
    ];
    let mut liouville = Vec::new();
    for (i, l) in p.liouville.iter().enumerate() {
        let c = l.c.build(p.n.saturating_sub(1))?;
        let rep = liouville_bound_check(|u| c.eval(u), p.n.saturating_sub(1), l.m, l.bound, &l.radii)?;
        let ratio = rep.samples.iter().map(|s| s.value / s.limit).fold(0.0, worst);
        checks.push(Check::new(
            &format!("liouville[{i}]"),
            ratio,
            1.0,
            rep.samples.len(),
            rep.passed == l.expect_pass,
        ));
        liouville.push(json!({
            "m": l.m,
            "bound": l.bound,
            "expect_pass": l.expect_pass,
            "report": rep,
        }));
    }
    Ok(Outcome {
        tolerances: json!({ "tol": p.tol, "zero_frequency_tol": ZERO_FREQUENCY_TOL }),
        checks,
        result: json!({
            "quad_points": p.quad_points,
            "window": p.window,
            "koecher": report,
            "liouville": liouville,
        }),
        files: Vec::new(),
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Tensor grid over the region's `u` box, or just `u = 0` without a region.
fn u_grid(n: usize, region: Option<&Region>) -> Vec<Vec<Complex64>> {
    let mut grid = vec![Vec::new()];
    for j in 0..n.saturating_sub(1) {
        let (re, im) = match region {
            Some(r) => {
                let b = r.u_box[j];
                (linspace(b[0], b[1], r.grid[2 + 2 * j]), linspace(b[2], b[3], r.grid[3 + 2 * j]))
            }
            None => (vec![0.0], vec![0.0]),
        };
        grid = grid
            .into_iter()
            .flat_map(|u| {
                re.iter().flat_map({
                    let im = &im;
                    move |&x| {
                        let u = u.clone();
                        im.iter().map(move |&y| {
                            let mut v = u.clone();
                            v.push(Complex64::new(x, y));
                            v
                        })
                    }
                })
            })
            .collect();
    }
    grid
}

fn partials_plot(p: &SatakeParams, norms: &[Option<NormReport>]) -> String {
    Plot {
        title: "norm partials under doubling of x_max".into(),
        x_label: "x_max".into(),
        y_label: "partial L^s mass".into(),
        log_x: true,
        log_y: true,
        series: p
            .s_values
            .iter()
            .zip(norms)
            .filter_map(|(s, rep)| {
                rep.as_ref().map(|rep| Series {
                    label: format!("s = {s}"),
                    points: rep.partials.iter().map(|q| (q.x_max, q.value)).collect(),
                    joined: true,
                })
            })
            .collect(),
    }
    .to_svg()
}

pub fn satake_classify(mut p: SatakeParams, ctx: Context) -> Result<Outcome, CliError> {
    if let Some(t) = ctx.tol {
        p.stable_tol = t;
    }
    if p.s_values.is_empty() {
        return schema("s_values is empty");
    }
    if let Some(r) = &p.region {
        r.validate(p.n)?;
    }
    let x0 = p.x0.or(p.region.as_ref().map(|r| r.x_min)).unwrap_or(1.0);
    let (profile, rho, modes) = match (&p.profile, &p.modes) {
        (Some(profile), None) => (profile.clone(), p.rho.unwrap_or(0), None),
        (None, Some(specs)) => {
            let modes = specs.iter().map(|s| s.build(p.n)).collect::<Result<Vec<_>, _>>()?;
            let index = modes.first().map_or(MultiIndex::EMPTY, |m| m.index);
            if modes.iter().any(|m| m.index != index) {
                return schema("satake-classify modes must share one odd index");
            }
            if p.rho.is_some_and(|rho| rho != index.len()) {
                return schema(format!("rho differs from |I| = {}", index.len()));
            }
            let grid = u_grid(p.n, p.region.as_ref());
            let mut pairs = Vec::with_capacity(modes.len());
            for m in &modes {
                let sup = grid.iter().map(|u| m.c.eval(u).map(|c| c.norm())).try_fold(0.0, |a, v| v.map(|v| worst(a, v)))?;
                pairs.push((m.m, sup));
            }
            (GrowthProfile::from_modes(&pairs, x0), index.len(), Some((index, modes)))
        }
        _ => return schema("exactly one of `profile` and `modes` is required"),
    };

    let mut verdict = ClassifierVerdict::CuspLike;
    let mut threshold = 0;
    let mut bounds = Vec::new();
    for &s in &p.s_values {
        let c = classify(&profile, p.n, p.k, rho, s, x0)?;
        let pos = c
            .s_values
            .iter()
            .position(|e| *e == s)
            .ok_or_else(|| CliError::Schema(format!("exponent {s} not classified")))?;
        bounds.push(c.bounds[pos]);
        verdict = c.verdict;
        threshold = c.threshold;
    }
    let mut checks = vec![Check::new(
        "no_positive_frequency",
        f64::from(u8::from(profile.has_positive_frequency)),
        0.0,
        1,
        verdict != ClassifierVerdict::KoecherViolation,
    )];

    let mut norms: Vec<Option<NormReport>> = vec![None; p.s_values.len()];
    let dominant = match verdict {
        ClassifierVerdict::CuspLike => profile.m0,
        ClassifierVerdict::ConstantTermObstruction => Some(0.0),
        ClassifierVerdict::KoecherViolation => None,
    };
    if let (Some(region), Some((index, modes)), false) = (&p.region, &modes, verdict == ClassifierVerdict::KoecherViolation) {
        let comps: Vec<Component> = modes.iter().map(FourierMode::component).collect();
        let q = |w: &[Complex64]| comps.iter().map(|c| c.eval(w)).sum::<sbforms_core::Result<Complex64>>();
        let opts = NormOptions {
            doublings: p.doublings,
            stable_tol: p.stable_tol,
        };
        for (slot, &s) in norms.iter_mut().zip(&p.s_values) {
            let rep = ls_norm(q, p.n, p.k, *index, s, region, opts)?;
            let finite = match dominant {
                Some(m0) => tail_dichotomy(m0, p.k, rho, p.n, s, x0)?.is_finite(),
                None => true,
            };
            checks.push(Check::new(
                &format!("diagnostic[s={s}]"),
                rep.relative_change,
                p.stable_tol,
                rep.partials.len(),
                (rep.diagnostic == Diagnostic::Stable) == finite,
            ));
            *slot = Some(rep);
        }
    }

    let mut files = Vec::new();
    if ctx.plot && norms.iter().any(Option::is_some) {
        files.push(("norm_partials.svg".to_string(), partials_plot(&p, &norms).into_bytes()));
    }
    Ok(Outcome {
        tolerances: json!({ "stable_tol": p.stable_tol, "zero_frequency_tol": ZERO_FREQUENCY_TOL }),
        checks,
        result: json!({
            "verdict": verdict,
            "threshold": threshold,
            "n": p.n,
            "k": p.k,
            "rho": rho,
            "x0": x0,
            "profile": profile,
            "s_values": p.s_values,
            "bounds": bounds,
            "partials": norms,
        }),
        files,
    })
}

pub fn measure(mut p: MeasureParams, ctx: Context) -> Result<Outcome, CliError> {
    if let Some(t) = ctx.tol {
        p.tol = t;
    }
    let g = match &p.element {
        Some(g) => g.clone(),
        None => random_member(p.n, p.r, p.t_max, &mut ChaCha8Rng::seed_from_u64(ctx.seed)),
    };
    if g.n() != p.n {
        return schema(format!("element has n = {}, job has n = {}", g.n(), p.n));
    }
    let report = measure_check(&g, &p.center, p.half_width, p.samples, 0)?;
    Ok(Outcome {
        tolerances: json!({ "tol": p.tol }),
        checks: vec![Check::below("invariant_measure", report.relative_error, p.tol, report.samples)],
        result: json!({ "element": g, "measure": report }),
        files: Vec::new(),
    })
}
