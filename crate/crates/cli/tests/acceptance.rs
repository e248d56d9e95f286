//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Runs on a single worker thread.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbforms_cli::job::{VerifyParams, VerifyTolerances};
use sbforms_cli::suites::{cayley_suite, identity_suite, Check};
use sbforms_cli::{run, Args, Command};
use sbforms_core::domain::{HalfPlanePoint, Region};
use sbforms_core::fourier::{expand, koecher_check, liouville_bound_check, synthesize, CuspData, FourierMode};
use sbforms_core::grassmann::MultiIndex;
use sbforms_core::satake::{
    classify, ls_norm, tail_dichotomy, ClassifierVerdict, Diagnostic, Exponent, GrowthProfile, NormOptions, TailVerdict,
};
use sbforms_core::superfunc::Component;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn failures(checks: &[Check]) -> String {
    let bad: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} = {:e} (tol {:e})", c.name, c.value, c.tol))
        .collect();
    if bad.is_empty() {
        let worst = checks.iter().map(|c| format!("{} {:.1e}", c.name, c.value)).collect::<Vec<_>>();
        worst.join(", ")
    } else {
        bad.join("; ")
    }
}

fn criterion_1() -> Outcome {
    let p = VerifyParams {
        n: 2,
        r: 2,
        triples: 200,
        tolerances: VerifyTolerances {
            cocycle: 1e-10,
            delta_law: 1e-10,
            jacobian: 1e-6,
            heisenberg: 1e-12,
            cayley_conjugation: 1e-12,
            ..VerifyTolerances::default()
        },
        ..VerifyParams::default()
    };
    let start = Instant::now();
    let checks = match identity_suite(&p, 11) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let all = checks.len() == 5 && checks.iter().all(|c| c.passed && c.samples >= 5);
    outcome(all && secs < 10.0, format!("{} in {secs:.2} s", failures(&checks)))
}

fn criterion_2() -> Outcome {
    let p = VerifyParams {
        n: 2,
        r: 2,
        points: 100,
        tolerances: VerifyTolerances {
            round_trip: 1e-12,
            psi_level: 1e-12,
            cayley_slash: 1e-12,
            commuting_square: 1e-10,
            ..VerifyTolerances::default()
        },
        ..VerifyParams::default()
    };
    match cayley_suite(&p, 11) {
        Ok(checks) => outcome(checks.len() == 4 && checks.iter().all(|c| c.passed), failures(&checks)),
        Err(e) => outcome(false, e.to_string()),
    }
}

/// `(I, label, a, b)` with `c_{I,m}(w₂) = a + b w₂`.
type Fixture = Vec<(MultiIndex, i64, Complex64, Complex64)>;

fn fourier_fixture() -> Fixture {
    vec![
        (MultiIndex::EMPTY, -1, c(1.5, -0.5), c(0.2, 0.0)),
        (MultiIndex::EMPTY, -3, c(-0.7, 0.3), c(0.0, 0.0)),
        (MultiIndex::from_bits(0b01), -2, c(2.0, 1.0), c(0.0, -0.4)),
        (MultiIndex::from_bits(0b10), 0, c(0.25, 0.0), c(0.1, 0.1)),
        (MultiIndex::from_bits(0b11), -1, c(-1.0, -1.0), c(0.5, 0.0)),
    ]
}

fn criterion_3() -> Result<Outcome, sbforms_core::Error> {
    let start = Instant::now();
    let cusp = CuspData::new(2.0, 0.25, vec![0.25, 0.5])?;
    let k = 3;
    let fixture = fourier_fixture();
    let mut modes = Vec::new();
    for &(index, label, a, b) in &fixture {
        // twist = tr_I D + (k + |I|) χ, worked out by hand for this cusp
        let twist = index.indices().iter().map(|&i| [0.25, 0.5][i - 1]).sum::<f64>() + (k + index.len() as i64) as f64 * 0.25;
        let m = (label as f64 - twist) / 2.0;
        modes.push(FourierMode::new(index, m, Component::new("a + b w2", move |u| Ok(a + b * u[0]))));
    }
    let q = synthesize(2, 2, k, &modes)?;
    let bases = [
        HalfPlanePoint::new(vec![c(0.8, 0.0), c(0.3, -0.2)])?,
        HalfPlanePoint::new(vec![c(1.4, 0.6), c(-0.5, 0.1)])?,
    ];
    let entries = expand(&q, &cusp, -6..=6, &bases, 1024)?;
    let (mut recovery, mut leak, mut found): (f64, f64, usize) = (0.0, 0.0, 0);
    for e in &entries {
        match fixture.iter().find(|(i, l, _, _)| *i == e.index && *l == e.label) {
            Some(&(_, _, a, b)) => {
                let want = a + b * e.base[1];
                recovery = recovery.max((e.coefficient() - want).norm() / want.norm());
                found += 1;
            }
            None => leak = leak.max(e.value.norm()),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = found == fixture.len() * bases.len() && recovery < 1e-10 && leak < 1e-10 && secs < 5.0;
    Ok(outcome(
        passed,
        format!("recovery {recovery:.1e}, unused slots {leak:.1e}, {found} coefficients in {secs:.2} s"),
    ))
}

fn criterion_4() -> Result<Outcome, sbforms_core::Error> {
    let cusp = CuspData::new(1.0, 0.0, vec![])?;
    let mode = |m: f64, a: Complex64| FourierMode::new(MultiIndex::EMPTY, m, Component::constant(a));
    let negative = vec![mode(-1.0, c(1.0, 0.0)), mode(-2.0, c(0.5, -0.5)), mode(-3.0, c(0.0, 2.0))];
    let bases = [
        HalfPlanePoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)])?,
        HalfPlanePoint::new(vec![c(1.2, 0.3), c(0.4, -0.2)])?,
    ];
    let good = koecher_check(&synthesize(2, 0, 4, &negative)?, &cusp, -4..=4, &bases, 1e-10, 256)?;
    let mut injected = negative.clone();
    injected.push(mode(1.0, c(0.25, 0.0)));
    let bad = koecher_check(&synthesize(2, 0, 4, &injected)?, &cusp, -4..=4, &bases, 1e-10, 256)?;
    let named = bad.offending.len() == 1 && bad.offending[0].index == MultiIndex::EMPTY && (bad.offending[0].m - 1.0).abs() < 1e-12;

    let one = Component::constant(c(1.0, 0.0));
    let mut liouville_ok = true;
    for m in [-0.5, -1.0, -2.0] {
        liouville_ok &= liouville_bound_check(|u| one.eval(u), 1, m, 1.0, &[0.5, 1.0, 2.0, 4.0])?.passed;
    }
    let plus = liouville_bound_check(|u| one.eval(u), 1, 1.0, 1.0, &[2.0])?;
    let margin = (-4.0 * PI).exp();
    let hand = plus
        .samples
        .iter()
        .all(|s| (s.limit - margin).abs() <= 1e-15 * margin && (s.value - 1.0).abs() < 1e-15 && s.value > s.limit);
    let passed = good.passed && !bad.passed && named && liouville_ok && !plus.passed && hand;
    Ok(outcome(
        passed,
        format!(
            "clean max positive {:.1e}; injected offending {:?}; m=+1 limit {:.3e} vs e^(-4π) {margin:.3e}",
            good.max_positive,
            bad.offending.iter().map(|o| (o.index.to_string(), o.m)).collect::<Vec<_>>(),
            plus.samples.first().map_or(f64::NAN, |s| s.limit),
        ),
    ))
}

fn anchor_region(x_min: f64, x_max: f64) -> Region {
    Region {
        x_min,
        x_max,
        y_min: -0.5,
        y_max: 0.5,
        u_box: vec![[-1.0, 1.0, -1.0, 1.0]],
        grid: vec![12, 3, 8, 8],
    }
}

fn criterion_5() -> Result<Outcome, sbforms_core::Error> {
    let start = Instant::now();
    let q = |w: &[Complex64]| Ok(c(1.0, 0.0) + (w[0] * (-2.0 * PI)).exp() * 0.5);
    let region = anchor_region(1.0, 1e12);
    let opts = NormOptions {
        doublings: 4,
        stable_tol: 1e-6,
    };
    let s = Exponent::Finite(1.0);
    let v4 = tail_dichotomy(0.0, 4, 0, 2, s, 1.0)?;
    let v3 = tail_dichotomy(0.0, 3, 0, 2, s, 1.0)?;
    let verdicts = matches!(v4, TailVerdict::Infinite { alpha, .. } if alpha == -1.0)
        && matches!(v3, TailVerdict::Finite { alpha, .. } if alpha == -1.5);
    let n4 = ls_norm(q, 2, 4, MultiIndex::EMPTY, s, &region, opts)?;
    let n3 = ls_norm(q, 2, 3, MultiIndex::EMPTY, s, &region, opts)?;
    let grows = n4.partials.windows(2).all(|w| (w[1].value - w[0].value) / w[1].value > opts.stable_tol);
    let secs = start.elapsed().as_secs_f64();
    let passed = verdicts
        && grows
        && n4.diagnostic == Diagnostic::Growing
        && n3.diagnostic == Diagnostic::Stable
        && n3.relative_change <= 1e-6
        && secs < 30.0;
    Ok(outcome(
        passed,
        format!(
            "k=4 α=-1 {} last change {:.2e}; k=3 α=-1.5 {} last change {:.2e}; {secs:.2} s",
            if v4.is_finite() { "finite" } else { "infinite" },
            n4.relative_change,
            if v3.is_finite() { "finite" } else { "infinite" },
            n3.relative_change,
        ),
    ))
}

/// Adaptive Simpson.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

fn criterion_6() -> Result<Outcome, sbforms_core::Error> {
    let mut region = anchor_region(0.5, 4.0);
    region.grid = vec![16, 4, 16, 16];
    let q = |w: &[Complex64]| Ok((w[0] * (-2.0 * PI)).exp());
    let rep = ls_norm(q, 2, 4, MultiIndex::EMPTY, Exponent::Finite(1.0), &region, NormOptions::default())?;
    let x_end = rep.partials.last().map_or(region.x_max, |p| p.x_max);
    // |q∘Ψ| = e^{−2πx} e^{−π|u|²} and the weight is x^{k/2 − (n+1)} = x^{−1}
    let gauss = simpson(&|t| (-PI * t * t).exp(), -1.0, 1.0, 1e-15);
    let radial = simpson(&|x| (-2.0 * PI * x).exp() / x, region.x_min, x_end, 1e-15);
    let oracle = (region.y_max - region.y_min) * gauss * gauss * radial;
    let rel = (rep.value - oracle).abs() / oracle;
    Ok(outcome(rel < 1e-4, format!("ls_norm {:.12e} vs oracle {oracle:.12e}, relative {rel:.1e}", rep.value)))
}

/// Expected branch read off the profile itself.
fn expected_branch(p: &GrowthProfile) -> ClassifierVerdict {
    if p.has_positive_frequency {
        ClassifierVerdict::KoecherViolation
    } else if p.has_constant_term {
        ClassifierVerdict::ConstantTermObstruction
    } else {
        ClassifierVerdict::CuspLike
    }
}

fn criterion_7() -> Result<Outcome, sbforms_core::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut disagreements = Vec::new();
    let mut seen = [0usize; 3];
    for i in 0..20 {
        let n = rng.gen_range(2..=4usize);
        let rho = rng.gen_range(0..=2usize);
        let threshold = 2 * n as i64 - rho as i64;
        let x0 = rng.gen_range(0.5..3.0);
        let s = if rng.gen_bool(0.25) {
            Exponent::Infinity
        } else {
            Exponent::Finite(rng.gen_range(1.0..4.0))
        };
        let m0 = -rng.gen_range(0.05..2.0);
        let c_bound = rng.gen_range(0.1..5.0);
        let (profile, k) = match i % 3 {
            0 => (
                GrowthProfile {
                    m0: Some(m0),
                    has_positive_frequency: true,
                    has_constant_term: rng.gen_bool(0.5),
                    c_bound,
                },
                rng.gen_range(1..=10),
            ),
            1 => (
                GrowthProfile {
                    m0: if rng.gen_bool(0.5) { Some(m0) } else { None },
                    has_positive_frequency: false,
                    has_constant_term: true,
                    c_bound,
                },
                rng.gen_range(threshold..=threshold + 4),
            ),
            _ => (
                GrowthProfile {
                    m0: Some(m0),
                    has_positive_frequency: false,
                    has_constant_term: false,
                    c_bound,
                },
                rng.gen_range(1..=10),
            ),
        };
        let got = classify(&profile, n, k, rho, s, x0)?;
        let want = expected_branch(&profile);
        seen[want as usize] += 1;
        let mut ok = got.verdict == want && got.threshold == threshold;
        for (e, bound) in got.s_values.iter().zip(&got.bounds) {
            match want {
                ClassifierVerdict::KoecherViolation => {
                    ok &= bound.is_none() && tail_dichotomy(-m0, k, rho, n, *e, x0).is_err();
                }
                ClassifierVerdict::ConstantTermObstruction => {
                    ok &= bound.is_none() && !tail_dichotomy(0.0, k, rho, n, *e, x0)?.is_finite();
                }
                ClassifierVerdict::CuspLike => {
                    let t = tail_dichotomy(m0, k, rho, n, *e, x0)?;
                    let scale = match e {
                        Exponent::Finite(s) => c_bound.powf(*s),
                        Exponent::Infinity => c_bound,
                    };
                    ok &= match (t.bound(), bound) {
                        (Some(b), Some(got)) => (got - scale * b).abs() <= 1e-12 * got.abs(),
                        _ => false,
                    };
                }
            }
        }
        if !ok {
            disagreements.push(format!("profile {i}: {profile:?} k={k} s={s} got {:?}", got.verdict));
        }
    }
    let passed = disagreements.is_empty() && seen.iter().all(|&c| c > 0);
    Ok(outcome(
        passed,
        format!(
            "branches cusp-like/obstruction/koecher = {}/{}/{}, {} disagreements{}",
            seen[0],
            seen[1],
            seen[2],
            disagreements.len(),
            disagreements.iter().map(|d| format!("; {d}")).collect::<String>()
        ),
    ))
}

fn jobs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/jobs")
}

fn criterion_8(started: Instant) -> Outcome {
    let jobs = [
        (Command::Verify, "verify.json"),
        (Command::FourierExpand, "fourier-expand.json"),
        (Command::KoecherCheck, "koecher-check.json"),
        (Command::SatakeClassify, "satake-classify.json"),
        (Command::MeasureCheck, "measure-check.json"),
    ];
    let tmp = match tempfile::tempdir() {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut mismatched = Vec::new();
    for (command, file) in jobs {
        let mut outputs = Vec::new();
        for pass in 0..2 {
            let out = tmp.path().join(format!("{command}-{pass}"));
            let args = Args {
                command,
                job: jobs_dir().join(file),
                out: out.clone(),
                threads: Some(1),
                seed: Some(42),
                tol: None,
                plot: true,
            };
            let code = run(&args);
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .map(|d| {
                    d.filter_map(|e| e.ok())
                        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap_or_default()))
                        .collect()
                })
                .unwrap_or_default();
            files.sort();
            outputs.push((code, files));
        }
        let has_report = outputs[0].1.iter().any(|(n, _)| n == "report.json");
        if outputs[0] != outputs[1] || !has_report {
            mismatched.push(command.to_string());
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let passed = mismatched.is_empty() && secs < 60.0;
    outcome(
        passed,
        format!(
            "{} jobs byte-identical across reruns{}; acceptance wall clock {secs:.2} s",
            jobs.len() - mismatched.len(),
            if mismatched.is_empty() {
                String::new()
            } else {
                format!(", differing: {}", mismatched.join(", "))
            }
        ),
    )
}

fn lift(r: Result<Outcome, sbforms_core::Error>) -> Outcome {
    r.unwrap_or_else(|e| outcome(false, format!("error: {e}")))
}

fn main() -> ExitCode {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    let results = pool.install(|| {
        let started = Instant::now();
        vec![
            criterion_1(),
            criterion_2(),
            lift(criterion_3()),
            lift(criterion_4()),
            lift(criterion_5()),
            lift(criterion_6()),
            lift(criterion_7()),
            criterion_8(started),
        ]
    });
    for (i, r) in results.iter().enumerate() {
        println!("criterion {}: {} ({})", i + 1, if r.passed { "PASS" } else { "FAIL" }, r.detail);
    }
    if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
