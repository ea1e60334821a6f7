//! Rank tests: Wilcoxon signed-rank and Friedman.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::psychometric::std_normal_cdf;
use super::TestResult;
use crate::error::{Error, Result};

/// Largest sample size that gets the exact null distribution.
pub const WILCOXON_EXACT_MAX_N: usize = 25;

/// Average ranks (1-based) of `values`, plus the sizes of tie groups.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

fn tie_term(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult> {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    wilcoxon_signed_rank_diffs(&diffs)
}

/// Two-sided signed-rank test on paired differences. Zero differences are
/// dropped; ties share average ranks. Exact for `n ≤ 25`, otherwise normal
/// with continuity and tie correction. The statistic is `W⁺`.
pub fn wilcoxon_signed_rank_diffs(diffs: &[f64]) -> Result<TestResult> {
    if diffs.is_empty() {
        return Err(Error::EmptyInput("no paired observations"));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("differences must be finite"));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::DegenerateData(
            "all paired differences are zero".into(),
        ));
    }
    let n = nonzero.len();
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    if n <= WILCOXON_EXACT_MAX_N {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let p = exact_signed_rank_p(&doubled, (2.0 * w_plus).round() as usize);
        return Ok(TestResult::new("wilcoxon signed-rank", w_plus, p, true, n));
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&ties) / 48.0;
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p = 2.0 * std_normal_cdf(-z);
    Ok(TestResult::new("wilcoxon signed-rank", w_plus, p, false, n))
}

/// Two-sided exact p under random signs, counting subset sums of the
/// doubled (integer) ranks.
fn exact_signed_rank_p(doubled_ranks: &[usize], observed: usize) -> f64 {
    let max: usize = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in doubled_ranks {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let total = 2f64.powi(doubled_ranks.len() as i32);
    let le: u64 = counts[..=observed].iter().sum();
    let ge: u64 = counts[observed..].iter().sum();
    (2.0 * (le.min(ge) as f64) / total).min(1.0)
}

/// Friedman rank test; rows are blocks, columns treatments.
pub fn friedman_test(data: &[Vec<f64>]) -> Result<TestResult> {
    let n = data.len();
    if n < 2 {
        return Err(Error::invalid("Friedman test needs at least two blocks"));
    }
    let k = data[0].len();
    if k < 2 {
        return Err(Error::invalid(
            "Friedman test needs at least two treatments",
        ));
    }
    if data.iter().any(|row| row.len() != k) {
        return Err(Error::invalid(
            "every block must have one value per treatment",
        ));
    }
    if data.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    let mut rank_sums = vec![0.0; k];
    let mut ties_total = 0.0;
    for row in data {
        let (ranks, ties) = average_ranks(row);
        for (s, r) in rank_sums.iter_mut().zip(ranks) {
            *s += r;
        }
        ties_total += tie_term(&ties);
    }
    let (nf, kf) = (n as f64, k as f64);
    let correction = 1.0 - ties_total / (nf * (kf * kf * kf - kf));
    if correction <= 1e-12 {
        return Err(Error::DegenerateData("every block is constant".into()));
    }
    let sum_sq: f64 = rank_sums.iter().map(|r| r * r).sum();
    let q = 12.0 / (nf * kf * (kf + 1.0)) * sum_sq - 3.0 * nf * (kf + 1.0);
    let stat = (q / correction).max(0.0);
    let df = kf - 1.0;
    let chi = ChiSquared::new(df).expect("df >= 1");
    let p = (1.0 - chi.cdf(stat)).clamp(0.0, 1.0);
    let mut res = TestResult::new("friedman", stat, p, false, n);
    res.df = Some(df);
    Ok(res)
}
