//! The batch pipeline behind the CLI: simulate, fit, report, textures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use vibes_core::psych::{
    build_session_plan_with, import_session, run_simulated_session, SessionLog, SessionStatus,
};
use vibes_core::rng;
use vibes_core::signal::{dft321_reduce, highpass_filter, to_pwm_schedule, write_pwm_csv};
use vibes_core::stats::{
    benjamini_yekutieli_adjust, bootstrap_fit, fit_psychometric, wilcoxon_signed_rank, FitReport,
    Link, TestReport,
};
use vibes_core::texture::{
    build_stimulus_library_with, ManifestEntry, ObserverKind, ObserverModel,
};
use vibes_core::Error as CoreError;

use crate::config::{parse_grits, WorkbenchConfig};
use crate::error::{Result, WorkbenchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ObserverChoice {
    Analytic,
    Chain,
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub observer: ObserverChoice,
    pub link: Link,
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub seed: u64,
    pub plan_seed: u64,
    pub reps: usize,
    pub participant: Option<String>,
    pub condition: String,
}

impl SimulateOptions {
    pub fn from_config(cfg: &WorkbenchConfig) -> Self {
        Self {
            observer: ObserverChoice::Analytic,
            link: Link::Logit,
            beta0: -2.326,
            beta1: 0.01701,
            sigma: 0.3,
            seed: cfg.seeds.observer,
            plan_seed: cfg.seeds.plan,
            reps: cfg.stimuli.reps,
            participant: None,
            condition: String::new(),
        }
    }
}

pub fn observer_model(cfg: &WorkbenchConfig, opts: &SimulateOptions) -> ObserverModel {
    let kind = match opts.observer {
        ObserverChoice::Analytic => ObserverKind::Analytic {
            beta0: opts.beta0,
            beta1: opts.beta1,
            link: opts.link,
        },
        ObserverChoice::Chain => ObserverKind::SignalChain {
            sigma: opts.sigma,
            filter: cfg.signal.filter(),
            frame_len: cfg.signal.frame_len,
        },
    };
    ObserverModel {
        kind,
        seed: opts.seed,
    }
}

pub fn simulate(cfg: &WorkbenchConfig, opts: &SimulateOptions) -> Result<SessionLog> {
    let plan = build_session_plan_with(
        cfg.stimuli.reference_grit()?,
        cfg.stimuli.comparison_grits()?,
        opts.reps,
        cfg.stimuli.replicates,
        opts.plan_seed,
    )?
    .with_condition(opts.condition.clone());
    let observer = observer_model(cfg, opts);
    let library = match opts.observer {
        ObserverChoice::Analytic => None,
        ObserverChoice::Chain => {
            let mut grits = plan.comparisons.clone();
            if !grits
                .iter()
                .any(|g| g.particle_um == plan.reference.particle_um)
            {
                grits.push(plan.reference.clone());
            }
            Some(build_stimulus_library_with(
                &grits,
                cfg.stimuli.replicates,
                cfg.stimuli.duration_s,
                &cfg.texture_model(),
            )?)
        }
    };
    let mut log = run_simulated_session(&plan, &observer, library.as_ref())?;
    if let Some(p) = &opts.participant {
        log.participant_id = p.clone();
    }
    Ok(log)
}

/// Point fit plus bootstrap CIs; `ci` is null when `resamples` is 0 or the
/// bootstrap was degenerate.
pub fn fit_trials(
    trials: &[(f64, bool)],
    link: Link,
    resamples: usize,
    seed: u64,
) -> Result<FitReport> {
    let fit = fit_psychometric(trials, link)?;
    if resamples == 0 {
        return Ok(FitReport::from_fit(&fit, seed));
    }
    match bootstrap_fit(trials, link, resamples, seed) {
        Ok(b) => Ok(FitReport::from_bootstrap(&b)),
        Err(CoreError::DegenerateBootstrap { .. } | CoreError::DegenerateData(_)) => {
            Ok(FitReport::from_fit(&fit, seed))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn fit_log(log: &SessionLog, link: Link, resamples: usize, seed: u64) -> Result<FitReport> {
    fit_trials(&log.fit_trials(), link, resamples, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionEntry {
    pub file: String,
    pub participant_id: String,
    pub condition_label: String,
    pub status: SessionStatus,
    pub n_trials: usize,
    pub fit: Option<FitReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledEntry {
    pub condition_label: String,
    pub n_sessions: usize,
    pub fit: Option<FitReport>,
    pub error: Option<String>,
}

/// Paired per-participant JND comparison between two conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionTest {
    pub conditions: [String; 2],
    pub n_pairs: usize,
    pub test: TestReport,
    pub p_adjusted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub link: Link,
    pub n_resamples: usize,
    pub seed: u64,
    pub sessions: Vec<SessionEntry>,
    pub pooled: Vec<PooledEntry>,
    pub jnd_tests: Vec<ConditionTest>,
    pub skipped: Vec<Skipped>,
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| WorkbenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn split(r: Result<FitReport>) -> (Option<FitReport>, Option<String>) {
    match r {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

/// Fits every session log in `dir` on its own and pooled per condition, then
/// compares per-participant JNDs between conditions.
pub fn build_report(dir: &Path, link: Link, resamples: usize, seed: u64) -> Result<Report> {
    let mut logs = Vec::new();
    let mut skipped = Vec::new();
    for path in json_files(dir)? {
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match import_session(&path) {
            Ok(log) => logs.push((file, log)),
            Err(e) => skipped.push(Skipped {
                file,
                reason: e.to_string(),
            }),
        }
    }
    if logs.is_empty() {
        return Err(CoreError::EmptyInput("no session logs in report directory").into());
    }

    let sessions: Vec<SessionEntry> = logs
        .iter()
        .enumerate()
        .map(|(i, (file, log))| {
            let (fit, error) = split(fit_log(log, link, resamples, rng::derive(seed, i as u64)));
            SessionEntry {
                file: file.clone(),
                participant_id: log.participant_id.clone(),
                condition_label: log.plan.condition_label.clone(),
                status: log.status(),
                n_trials: log.answered(),
                fit,
                error,
            }
        })
        .collect();

    let mut by_condition: BTreeMap<&str, Vec<&SessionLog>> = BTreeMap::new();
    for (_, log) in &logs {
        by_condition
            .entry(log.plan.condition_label.as_str())
            .or_default()
            .push(log);
    }
    let pooled = by_condition
        .iter()
        .enumerate()
        .map(|(i, (label, group))| {
            let trials: Vec<(f64, bool)> = group.iter().flat_map(|l| l.fit_trials()).collect();
            let (fit, error) = split(fit_trials(
                &trials,
                link,
                resamples,
                rng::derive(seed, (1 << 32) + i as u64),
            ));
            PooledEntry {
                condition_label: label.to_string(),
                n_sessions: group.len(),
                fit,
                error,
            }
        })
        .collect();

    Ok(Report {
        link,
        n_resamples: resamples,
        seed,
        jnd_tests: condition_tests(&sessions)?,
        sessions,
        pooled,
        skipped,
    })
}

fn condition_tests(sessions: &[SessionEntry]) -> Result<Vec<ConditionTest>> {
    let mut jnd: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    for s in sessions {
        if let Some(f) = &s.fit {
            jnd.entry(s.condition_label.as_str())
                .or_default()
                .insert(s.participant_id.as_str(), f.jnd_um);
        }
    }
    let labels: Vec<&str> = jnd.keys().copied().collect();
    let mut tests = Vec::new();
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            let pairs: Vec<(f64, f64)> = jnd[a]
                .iter()
                .filter_map(|(p, &x)| jnd[b].get(p).map(|&y| (x, y)))
                .collect();
            if let Ok(t) = wilcoxon_signed_rank(&pairs) {
                tests.push(ConditionTest {
                    conditions: [a.to_string(), b.to_string()],
                    n_pairs: pairs.len(),
                    test: TestReport::from(&t),
                    p_adjusted: t.p_value,
                });
            }
        }
    }
    if !tests.is_empty() {
        let p: Vec<f64> = tests.iter().map(|t| t.test.p).collect();
        for (t, q) in tests.iter_mut().zip(benjamini_yekutieli_adjust(&p)?) {
            t.p_adjusted = q;
        }
    }
    Ok(tests)
}

/// Pretty JSON with a trailing LF.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| WorkbenchError::io(path, e))
}

/// Saves the library plus one `<label>.pwm.csv` actuator schedule per trace.
pub fn write_textures(
    cfg: &WorkbenchConfig,
    grits: &[String],
    per_grit: usize,
    out: &Path,
) -> Result<Vec<ManifestEntry>> {
    let grits = parse_grits(grits)?;
    let library = build_stimulus_library_with(
        &grits,
        per_grit,
        cfg.stimuli.duration_s,
        &cfg.texture_model(),
    )?;
    let manifest = library.write_to_dir(out)?;
    let filter = cfg.signal.filter();
    for e in &library.entries {
        let reduced = dft321_reduce(&highpass_filter(&e.trace, &filter)?, cfg.signal.frame_len)?;
        let pwm = to_pwm_schedule(&reduced, cfg.signal.pwm_gain)?;
        let path = out.join(format!("{}.pwm.csv", e.label));
        let file = std::fs::File::create(&path).map_err(|err| WorkbenchError::io(&path, err))?;
        write_pwm_csv(std::io::BufWriter::new(file), &pwm)?;
    }
    Ok(manifest)
}
