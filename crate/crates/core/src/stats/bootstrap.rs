//! Nonparametric case-resampling bootstrap for JND and PSE.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::psychometric::{fit_grouped, group_trials, Level, Link, PsychometricFit};
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

pub const DEFAULT_RESAMPLES: usize = 2000;
pub const CI_LEVEL: f64 = 0.95;
/// Fraction of resamples allowed to need a redraw before giving up.
pub const FAILURE_BUDGET: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Jnd,
    Pse,
}

impl Statistic {
    pub fn of<S: Scalar>(self, fit: &PsychometricFit<S>) -> S {
        match self {
            Statistic::Jnd => fit.jnd,
            Statistic::Pse => fit.pse,
        }
    }
}

/// Percentile interval. `lo <= hi` always; the point estimate need not lie
/// inside.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCI<S> {
    pub point: S,
    pub lo: S,
    pub hi: S,
    pub level: f64,
    pub n_resamples: usize,
    pub seed: u64,
    /// Resamples whose refit failed and were redrawn.
    pub redraws: usize,
}

impl<S: Scalar> BootstrapCI<S> {
    pub fn contains(&self, v: S) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapFit<S> {
    pub fit: PsychometricFit<S>,
    pub jnd: BootstrapCI<S>,
    pub pse: BootstrapCI<S>,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn resample<S: Scalar>(trials: &[(S, bool)], rng: &mut rng::Rng) -> Vec<Level<S>> {
    let n = trials.len();
    let draw: Vec<(S, bool)> = (0..n).map(|_| trials[rng.random_range(0..n)]).collect();
    group_trials(&draw)
}

fn fit_ok<S: Scalar>(levels: &[Level<S>], link: Link) -> Option<PsychometricFit<S>> {
    fit_grouped(levels, link)
        .ok()
        .map(|(f, _)| f)
        .filter(|f| f.converged && f.jnd.is_finite() && f.pse.is_finite())
}

/// Bootstraps JND and PSE together from one set of resamples.
///
/// Resample `b` draws from its own seed stream, so results do not depend on
/// thread scheduling. A failed refit is redrawn from the same stream; if more
/// than 10% of resamples need a redraw the call fails with the values
/// gathered so far.
pub fn bootstrap_fit<S: Scalar>(
    trials: &[(S, bool)],
    link: Link,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapFit<S>> {
    if n_resamples == 0 {
        return Err(Error::invalid("n_resamples must be positive"));
    }
    let full = fit_ok(&group_trials(trials), link).ok_or_else(|| {
        Error::DegenerateData("psychometric fit on the full data did not converge".into())
    })?;
    let budget = (FAILURE_BUDGET * n_resamples as f64).floor() as usize;
    let max_attempts = budget + 1;

    let draws: Vec<(Option<(f64, f64)>, usize)> = (0..n_resamples)
        .into_par_iter()
        .map(|b| {
            let mut stream = rng::child(seed, b as u64);
            let mut failures = 0;
            while failures < max_attempts {
                if let Some(f) = fit_ok(&resample(trials, &mut stream), link) {
                    return (Some((f.jnd.as_f64(), f.pse.as_f64())), failures);
                }
                failures += 1;
            }
            (None, failures)
        })
        .collect();

    let redraws: usize = draws.iter().map(|d| d.1).sum();
    let (mut jnds, mut pses): (Vec<f64>, Vec<f64>) = draws.iter().filter_map(|d| d.0).unzip();
    if redraws > budget || jnds.len() < n_resamples {
        return Err(Error::DegenerateBootstrap {
            failed: redraws,
            attempted: n_resamples + redraws,
            partial: jnds,
        });
    }
    let ci = |values: &mut Vec<f64>, point: S| {
        values.sort_by(f64::total_cmp);
        let alpha = (1.0 - CI_LEVEL) / 2.0;
        BootstrapCI {
            point,
            lo: S::lit(quantile_sorted(values, alpha)),
            hi: S::lit(quantile_sorted(values, 1.0 - alpha)),
            level: CI_LEVEL,
            n_resamples,
            seed,
            redraws,
        }
    };
    Ok(BootstrapFit {
        jnd: ci(&mut jnds, full.jnd),
        pse: ci(&mut pses, full.pse),
        fit: full,
    })
}

pub fn bootstrap_ci<S: Scalar>(
    trials: &[(S, bool)],
    link: Link,
    statistic: Statistic,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapCI<S>> {
    let b = bootstrap_fit(trials, link, n_resamples, seed)?;
    Ok(match statistic {
        Statistic::Jnd => b.jnd,
        Statistic::Pse => b.pse,
    })
}
