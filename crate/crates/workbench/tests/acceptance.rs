//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p vibes-workbench --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use vibes_core::psych::{build_session_plan, run_simulated_session, SessionPlan};
use vibes_core::rng;
use vibes_core::signal::dft321_frame;
use vibes_core::stats::{
    benjamini_yekutieli_adjust, bootstrap_fit, confusion_metrics, fit_psychometric, friedman_test,
    nasa_rtlx_index, slip_and_reaction, studentized_range_quantile, sus_score,
    wilcoxon_signed_rank_diffs, EventKind, Link, TaskEvent,
};
use vibes_core::texture::{
    build_stimulus_library, canonical_grits, simulate_identification, GritLevel, Identifier,
    ObserverModel, TextureModel,
};

const TARGET_JND: f64 = 58.79;
const TARGET_PSE: f64 = 136.73;
const BETA0: f64 = -2.326;
const BETA1: f64 = 0.01701;
const PROBIT_JND: f64 = 44.07;
const SESSIONS: u64 = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn plan(seed: u64) -> SessionPlan {
    build_session_plan(GritLevel::reference(), canonical_grits(), 20, seed).unwrap()
}

fn session_trials(s: u64, observer: &ObserverModel) -> Vec<(f64, bool)> {
    run_simulated_session(&plan(10_000 + s), observer, None)
        .unwrap()
        .fit_trials()
}

fn dft321_energy() -> Outcome {
    let n = 256;
    let mut r = rng::stream(11);
    let frames: Vec<[Vec<f64>; 3]> = (0..1000)
        .map(|_| std::array::from_fn(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect()))
        .collect();
    // Only the reduction is timed; the O(n^2) oracle runs afterwards.
    let start = Instant::now();
    let outputs: Vec<Vec<f64>> = frames
        .iter()
        .map(|[x, y, z]| dft321_frame(x, y, z).unwrap())
        .collect();
    let elapsed = start.elapsed();

    let dft = NaiveDft::new(n);
    let mut worst: f64 = 0.0;
    for ([x, y, z], out) in frames.iter().zip(&outputs) {
        let (ex, ey, ez, eo) = (dft.energy(x), dft.energy(y), dft.energy(z), dft.energy(out));
        let total: f64 = (0..n).map(|k| ex[k] + ey[k] + ez[k]).sum();
        for k in 0..n {
            worst = worst.max((eo[k] - (ex[k] + ey[k] + ez[k])).abs() / total);
        }
    }
    let zeros = vec![0.0; n];
    let single_axis_ok = frames.iter().step_by(50).all(|[x, y, z]| {
        [(x, 0), (y, 1), (z, 2)].into_iter().all(|(a, i)| {
            let mut axes = [&zeros, &zeros, &zeros];
            axes[i] = a;
            let only = dft321_frame(axes[0], axes[1], axes[2]).unwrap();
            only.iter()
                .zip(a)
                .all(|(u, v)| (u - v).abs() <= 1e-12 * (1.0 + v.abs()))
        })
    });
    outcome(
        worst <= 1e-9 && single_axis_ok && elapsed < Duration::from_secs(5),
        format!("1000 frames: max per-bin energy error {worst:.2e} (tol 1e-9), single-axis identity {single_axis_ok}, reduction {elapsed:.2?} (< 5 s)"),
    )
}

/// Per-bin |X_k|^2 by the O(n^2) definition, with a cached twiddle table.
struct NaiveDft {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl NaiveDft {
    fn new(n: usize) -> Self {
        let w = -2.0 * std::f64::consts::PI / n as f64;
        Self {
            cos: (0..n).map(|m| (w * m as f64).cos()).collect(),
            sin: (0..n).map(|m| (w * m as f64).sin()).collect(),
        }
    }

    fn energy(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, &v) in x.iter().enumerate() {
                    let m = (k * t) % n;
                    re += v * self.cos[m];
                    im += v * self.sin[m];
                }
                re * re + im * im
            })
            .collect()
    }
}

fn estimator_recovery() -> Outcome {
    let start = Instant::now();
    let (mut jnd, mut pse) = (Vec::new(), Vec::new());
    for s in 0..SESSIONS {
        let fit = fit_psychometric(
            &session_trials(s, &ObserverModel::analytic(BETA0, BETA1, s)),
            Link::Logit,
        )
        .unwrap();
        jnd.push(fit.jnd);
        pse.push(fit.pse);
    }
    let (mj, mp) = (median(jnd), median(pse));
    let ej = (mj / TARGET_JND - 1.0).abs();
    let ep = (mp / TARGET_PSE - 1.0).abs();
    let elapsed = start.elapsed();
    outcome(
        ej <= 0.10 && ep <= 0.05 && elapsed < Duration::from_secs(60),
        format!(
            "median JND {mj:.2} µm ({:.1}% off {TARGET_JND}, tol 10%), median PSE {mp:.2} µm ({:.1}% off {TARGET_PSE}, tol 5%), {elapsed:.2?} (< 60 s)",
            100.0 * ej,
            100.0 * ep
        ),
    )
}

fn bootstrap_coverage() -> Outcome {
    let start = Instant::now();
    let truth = 1.0 / BETA1;
    let mut covered = 0;
    let mut degenerate = 0;
    for s in 0..SESSIONS {
        let trials = session_trials(s, &ObserverModel::analytic(BETA0, BETA1, 500 + s));
        match bootstrap_fit(&trials, Link::Logit, 2000, rng::derive(77, s)) {
            Ok(b) => covered += usize::from(b.jnd.contains(truth)),
            Err(_) => degenerate += 1,
        }
    }
    let rate = covered as f64 / SESSIONS as f64;
    let elapsed = start.elapsed();
    outcome(
        rate >= 0.88 && elapsed < Duration::from_secs(300),
        format!(
            "95% JND CI covers {truth:.2} µm in {covered}/{SESSIONS} sessions ({:.1}%, need >= 88%), {degenerate} degenerate, B = 2000, {elapsed:.2?} (< 5 min)",
            100.0 * rate
        ),
    )
}

fn probit_recovery() -> Outcome {
    let pse = 127.0;
    let mut jnd = Vec::new();
    for s in 0..SESSIONS {
        let obs = ObserverModel::probit(PROBIT_JND, pse, 900 + s);
        jnd.push(
            fit_psychometric(&session_trials(s, &obs), Link::Probit)
                .unwrap()
                .jnd,
        );
    }
    let m = median(jnd);
    let e = (m / PROBIT_JND - 1.0).abs();
    outcome(
        e <= 0.15,
        format!(
            "median probit JND {m:.2} µm ({:.1}% off {PROBIT_JND}, tol 15%)",
            100.0 * e
        ),
    )
}

/// Two-sided exact signed-rank p by walking all 2^n sign patterns.
fn brute_force_wilcoxon(diffs: &[f64]) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nz.len();
    let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
    let ranks: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let tied = abs.iter().filter(|b| *b == a).count() as f64;
            below + (tied + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = nz
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        le += u64::from(w <= observed + 1e-9);
        ge += u64::from(w >= observed - 1e-9);
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le.min(ge) as f64) / total).min(1.0)
}

fn exact_tests() -> Outcome {
    let mut r = rng::stream(2024);
    let mut corpus: Vec<Vec<f64>> = vec![vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![2.5, -2.5]];
    for n in 1..=12 {
        for rep in 0..4 {
            corpus.push(
                (0..n)
                    .map(|_| {
                        let v: f64 = r.random_range(-5.0..5.0);
                        // Every other dataset is rounded to force tied ranks.
                        if rep % 2 == 0 {
                            (v * 2.0).round() / 2.0
                        } else {
                            v
                        }
                    })
                    .filter(|d| *d != 0.0)
                    .collect(),
            );
        }
    }
    corpus.retain(|d| !d.is_empty());
    let mut worst: f64 = 0.0;
    for d in &corpus {
        let t = wilcoxon_signed_rank_diffs(d).unwrap();
        worst = worst.max((t.p_value - brute_force_wilcoxon(d)).abs());
    }
    let w15 = wilcoxon_signed_rank_diffs(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let wilcoxon_ok =
        worst <= 1e-12 && w15.statistic == 15.0 && (w15.p_value - 0.0625).abs() <= 1e-12;

    let blocks: Vec<Vec<f64>> = (0..4)
        .map(|b| vec![1.0 + b as f64, 2.0 + b as f64, 3.0 + b as f64])
        .collect();
    let fr = friedman_test(&blocks).unwrap();
    let friedman_ok = (fr.statistic - 8.0).abs() <= 1e-12 && fr.df == Some(2.0);

    let by = benjamini_yekutieli_adjust(&[0.01, 0.02, 0.05]).unwrap();
    let expected = [0.055, 0.055, 0.05 * 11.0 / 6.0];
    let by_ok = by.iter().zip(expected).all(|(a, b)| (a - b).abs() <= 1e-15)
        && (by[2] - 0.09167).abs() < 5e-6;

    outcome(
        wilcoxon_ok && friedman_ok && by_ok,
        format!(
            "Wilcoxon: {} datasets n <= 12, max |p - enumeration| {worst:.1e} (tol 1e-12), {{1..5}} W+ {} p {}; Friedman 4x3 statistic {} df {:?}; BY {by:?}",
            corpus.len(),
            w15.statistic,
            w15.p_value,
            fr.statistic,
            fr.df
        ),
    )
}

fn mc_range_quantile(k: usize, draws: usize, seed: u64) -> f64 {
    let mut r = rng::stream(seed);
    let mut ranges: Vec<f64> = (0..draws)
        .map(|_| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..k {
                let z: f64 = StandardNormal.sample(&mut r);
                lo = lo.min(z);
                hi = hi.max(z);
            }
            hi - lo
        })
        .collect();
    ranges.sort_by(f64::total_cmp);
    ranges[(0.95 * draws as f64) as usize]
}

fn studentized_range() -> Outcome {
    let q2 = studentized_range_quantile(0.05, 2, f64::INFINITY).unwrap();
    let q3 = studentized_range_quantile(0.05, 3, f64::INFINITY).unwrap();
    let (m2, m3) = (
        mc_range_quantile(2, 1_000_000, 5),
        mc_range_quantile(3, 1_000_000, 6),
    );
    let ok = (q2 - 2.772).abs() <= 0.01
        && (q3 - 3.314).abs() <= 0.01
        && (q2 - m2).abs() <= 0.01
        && (q3 - m3).abs() <= 0.01;
    outcome(
        ok,
        format!("q(0.05,2,inf) = {q2:.4} (2.772), q(0.05,3,inf) = {q3:.4} (3.314), tol 0.01; 10^6-draw Monte Carlo {m2:.4}, {m3:.4}"),
    )
}

fn chance_level() -> Outcome {
    let lib = build_stimulus_library(&canonical_grits(), 2, &TextureModel::default()).unwrap();
    let uniform: f64 = (0..50)
        .map(|s| {
            let m = simulate_identification(&lib, &Identifier::Uniform, 10, 5, s).unwrap();
            confusion_metrics(&m).unwrap().overall_accuracy
        })
        .sum::<f64>()
        / 50.0;
    let chain = Identifier::SignalChain(ObserverModel::signal_chain(0.3, 0));
    let chain_acc: Vec<f64> = (0..20)
        .map(|s| {
            let m = simulate_identification(&lib, &chain, 10, 5, 100 + s).unwrap();
            confusion_metrics(&m).unwrap().overall_accuracy
        })
        .collect();
    let min = chain_acc.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = chain_acc.iter().sum::<f64>() / chain_acc.len() as f64;
    outcome(
        (uniform - 0.20).abs() <= 0.03 && min > 0.20,
        format!("uniform responder mean accuracy {uniform:.4} over 50 runs (0.20 +/- 0.03); signal chain sigma 0.3 mean {mean:.3}, min {min:.3} over 20 seeds (> 0.20)"),
    )
}

fn scores() -> Outcome {
    let mut checks = vec![
        ("RTLX all 10", nasa_rtlx_index(&[10.0; 6]).unwrap(), 50.0),
        (
            "RTLX {9,8,10,9,10,9}",
            nasa_rtlx_index(&[9.0, 8.0, 10.0, 9.0, 10.0, 9.0]).unwrap(),
            55.0 * 5.0 / 6.0,
        ),
        ("RTLX all 0", nasa_rtlx_index(&[0.0; 6]).unwrap(), 0.0),
        ("RTLX all 20", nasa_rtlx_index(&[20.0; 6]).unwrap(), 100.0),
        (
            "SUS best",
            sus_score(&[5, 1, 5, 1, 5, 1, 5, 1, 5, 1]).unwrap(),
            100.0,
        ),
        ("SUS all 3", sus_score(&[3; 10]).unwrap(), 50.0),
        (
            "SUS item sum 30",
            sus_score(&[4, 2, 4, 2, 4, 2, 4, 2, 4, 2]).unwrap(),
            75.0,
        ),
        (
            "SUS {4,2,..,4,3}",
            sus_score(&[4, 2, 4, 2, 4, 2, 4, 2, 4, 3]).unwrap(),
            72.5,
        ),
    ];
    let plain = slip_and_reaction(
        &[
            TaskEvent {
                kind: EventKind::Grasp,
                t_s: 0.0,
            },
            TaskEvent {
                kind: EventKind::Open,
                t_s: 10.0,
            },
            TaskEvent {
                kind: EventKind::Close,
                t_s: 10.55,
            },
        ],
        20.0,
        Some(15.0),
        false,
    )
    .unwrap();
    checks.push(("slip 20 -> 15", plain.slip, 5.0));
    checks.push((
        "reaction 10.00 -> 10.55",
        plain.reaction_time_s.unwrap(),
        0.55,
    ));
    let fall = slip_and_reaction(&[], 11.5, None, true).unwrap();
    checks.push(("fall slip from start", fall.slip, 11.5));
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-12)
        .map(|(name, got, want)| format!("{name}: {got} != {want}"))
        .collect();
    let ok = bad.is_empty() && fall.fell && fall.x_finish.is_none();
    outcome(
        ok,
        if bad.is_empty() {
            format!(
                "{} RTLX/SUS/slip/reaction examples exact, fall flag carried",
                checks.len()
            )
        } else {
            bad.join("; ")
        },
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vibes"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn pipeline(dir: &Path) -> Result<Vec<u8>, String> {
    let logs = dir.join("logs");
    std::fs::create_dir_all(&logs).map_err(|e| e.to_string())?;
    let p = |name: &str| logs.join(name).to_string_lossy().into_owned();
    for (i, cond) in [("1", "A"), ("2", "A"), ("3", "B"), ("4", "B")] {
        let participant = format!("p{}", i.parse::<u32>().unwrap().div_ceil(2));
        run_cli(&[
            "simulate",
            "--observer",
            "analytic",
            "--beta0",
            "-2.326",
            "--beta1",
            "0.01701",
            "--seed",
            i,
            "--plan-seed",
            "42",
            "--participant",
            &participant,
            "--condition",
            cond,
            "--trials-out",
            &p(&format!("s{i}.json")),
        ])?;
    }
    let fit = dir.join("fit.json");
    run_cli(&[
        "fit",
        "--in",
        &p("s1.json"),
        "--bootstrap",
        "500",
        "--seed",
        "3",
        "--out",
        &fit.to_string_lossy(),
    ])?;
    let report = dir.join("report.json");
    run_cli(&[
        "report",
        "--in",
        &logs.to_string_lossy(),
        "--out",
        &report.to_string_lossy(),
        "--bootstrap",
        "500",
        "--seed",
        "3",
    ])?;
    let mut bytes = std::fs::read(&fit).map_err(|e| e.to_string())?;
    bytes.extend(std::fs::read(&report).map_err(|e| e.to_string())?);
    Ok(bytes)
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    match (pipeline(a.path()), pipeline(b.path())) {
        (Ok(x), Ok(y)) => outcome(
            x == y && !x.is_empty(),
            format!(
                "simulate -> fit -> report twice: {} bytes each, identical {}",
                x.len(),
                x == y
            ),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, format!("pipeline failed: {e}")),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("dft321-energy-preservation", dft321_energy),
        ("estimator-recovery", estimator_recovery),
        ("bootstrap-coverage", bootstrap_coverage),
        ("probit-recovery", probit_recovery),
        ("exact-test-oracles", exact_tests),
        ("studentized-range-quantiles", studentized_range),
        ("chance-level", chance_level),
        ("scores-and-slip", scores),
        ("cli-determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
