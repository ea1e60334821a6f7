//! Lilliefors test: Kolmogorov–Smirnov distance to a normal with estimated
//! mean and SD, calibrated by seeded Monte Carlo.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::psychometric::std_normal_cdf;
use super::TestResult;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_NULL_SIMULATIONS: usize = 10_000;

/// KS distance between the sample and `N(mean, sd²)` fitted to it.
pub fn lilliefors_statistic(sample: &[f64]) -> Result<f64> {
    let n = sample.len();
    if n < 4 {
        return Err(Error::invalid(
            "Lilliefors test needs at least 4 observations",
        ));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("sample values must be finite"));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let var = sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    if !(sd > 1e-300) || sd <= 1e-14 * mean.abs() {
        return Err(Error::DegenerateData("sample has zero variance".into()));
    }
    let mut z: Vec<f64> = sample.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    Ok(z.iter().enumerate().fold(0.0f64, |d, (i, &zi)| {
        let f = std_normal_cdf(zi);
        let i = i as f64;
        d.max((i + 1.0) / nf - f).max(f - i / nf)
    }))
}

/// Simulated null distribution of the statistic for one sample size.
#[derive(Debug, Clone)]
pub struct LillieforsNull {
    n: usize,
    sorted: Vec<f64>,
}

impl LillieforsNull {
    pub fn simulate(n: usize, simulations: usize, seed: u64) -> Result<Self> {
        if n < 4 || simulations == 0 {
            return Err(Error::invalid(
                "null simulation needs n >= 4 and at least one draw",
            ));
        }
        let mut sorted: Vec<f64> = (0..simulations)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::child(seed, i as u64);
                let draw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
                lilliefors_statistic(&draw).expect("normal draws have positive variance")
            })
            .collect();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { n, sorted })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(1 + #{D_null ≥ d}) / (1 + N)`.
    pub fn p_value(&self, d: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v < d);
        let at_least = self.sorted.len() - below;
        (1 + at_least) as f64 / (1 + self.sorted.len()) as f64
    }

    pub fn test(&self, sample: &[f64]) -> Result<TestResult> {
        if sample.len() != self.n {
            return Err(Error::invalid(format!(
                "null was simulated for n = {}, sample has {}",
                self.n,
                sample.len()
            )));
        }
        let d = lilliefors_statistic(sample)?;
        Ok(TestResult::new(
            "lilliefors",
            d,
            self.p_value(d),
            false,
            self.n,
        ))
    }
}

pub fn lilliefors_test(sample: &[f64], seed: u64) -> Result<TestResult> {
    lilliefors_test_with(sample, DEFAULT_NULL_SIMULATIONS, seed)
}

pub fn lilliefors_test_with(sample: &[f64], simulations: usize, seed: u64) -> Result<TestResult> {
    lilliefors_statistic(sample)?;
    LillieforsNull::simulate(sample.len(), simulations, seed)?.test(sample)
}
