//! Statistical procedures for the psychophysics and task analyses.

mod bootstrap;
mod confusion;
mod multiple;
mod nonparametric;
mod normality;
mod psychometric;
pub mod quadrature;
mod report;
mod scores;
mod studentized;
mod tasks;
mod ttest;

pub use bootstrap::{
    bootstrap_ci, bootstrap_fit, quantile_sorted, BootstrapCI, BootstrapFit, Statistic, CI_LEVEL,
    DEFAULT_RESAMPLES, FAILURE_BUDGET,
};
pub use confusion::{confusion_metrics, ConfusionMatrix, ConfusionMetrics};
pub use multiple::benjamini_yekutieli_adjust;
pub use nonparametric::{
    average_ranks, friedman_test, wilcoxon_signed_rank, wilcoxon_signed_rank_diffs,
    WILCOXON_EXACT_MAX_N,
};
pub use normality::{
    lilliefors_statistic, lilliefors_test, lilliefors_test_with, LillieforsNull,
    DEFAULT_NULL_SIMULATIONS,
};
pub use psychometric::{
    fit_grouped, fit_psychometric, fit_psychometric_diagnostics, group_trials, log_likelihood,
    FitDiagnostics, Level, Link, PsychometricFit, MAX_ITER, PARAM_TOL, SLOPE_MAX, SLOPE_MIN,
};
pub use report::{CiReport, FitReport, TestReport};
pub use scores::{nasa_rtlx_index, sus_score, LikertTable};
pub use studentized::{studentized_range_cdf, studentized_range_quantile, tukey_hsd_ci, TukeyHsd};
pub use tasks::{
    slip_and_reaction, summarize_fragile, summarize_slips, EventKind, FragileSummary, FragileTrial,
    SlipMetrics, SlipSummary, TaskEvent,
};
pub use ttest::{paired_t_test, paired_t_test_diffs};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic: f64,
    pub p_value: f64,
    pub exact: bool,
    pub n: usize,
    pub df: Option<f64>,
}

impl TestResult {
    pub fn new(method: &str, statistic: f64, p_value: f64, exact: bool, n: usize) -> Self {
        debug_assert!((0.0..=1.0).contains(&p_value), "p = {p_value}");
        Self {
            method: method.to_string(),
            statistic,
            p_value,
            exact,
            n,
            df: None,
        }
    }
}
