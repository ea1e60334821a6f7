use statrs::distribution::{ContinuousCDF, StudentsT};

use super::TestResult;
use crate::error::{Error, Result};

pub fn paired_t_test(pairs: &[(f64, f64)]) -> Result<TestResult> {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    paired_t_test_diffs(&diffs)
}

/// Two-sided one-sample t-test on paired differences, `df = n − 1`.
pub fn paired_t_test_diffs(diffs: &[f64]) -> Result<TestResult> {
    let n = diffs.len();
    if n < 2 {
        return Err(Error::invalid("paired t-test needs at least two pairs"));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("differences must be finite"));
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if !(var > 0.0) {
        return Err(Error::DegenerateData(
            "paired differences have zero variance".into(),
        ));
    }
    let t = mean / (var / nf).sqrt();
    let df = nf - 1.0;
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    let p = (2.0 * dist.cdf(-t.abs())).clamp(0.0, 1.0);
    let mut r = TestResult::new("paired t", t, p, false, n);
    r.df = Some(df);
    Ok(r)
}
