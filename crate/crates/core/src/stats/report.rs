//! JSON report forms for fits and hypothesis tests.

use serde::{Deserialize, Serialize};

use super::bootstrap::BootstrapFit;
use super::psychometric::{Link, PsychometricFit};
use super::TestResult;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiReport {
    pub jnd: [f64; 2],
    pub pse: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub link: Link,
    pub beta0: f64,
    pub beta1: f64,
    pub jnd_um: f64,
    pub pse_um: f64,
    /// Absent when no bootstrap was run or it was degenerate.
    pub ci: Option<CiReport>,
    pub n_trials: usize,
    pub converged: bool,
    pub seed: u64,
}

impl FitReport {
    pub fn from_fit<S: Scalar>(fit: &PsychometricFit<S>, seed: u64) -> Self {
        Self {
            link: fit.link,
            beta0: fit.beta0.as_f64(),
            beta1: fit.beta1.as_f64(),
            jnd_um: fit.jnd.as_f64(),
            pse_um: fit.pse.as_f64(),
            ci: None,
            n_trials: fit.n_trials,
            converged: fit.converged,
            seed,
        }
    }

    pub fn from_bootstrap<S: Scalar>(b: &BootstrapFit<S>) -> Self {
        let mut r = Self::from_fit(&b.fit, b.jnd.seed);
        r.ci = Some(CiReport {
            jnd: [b.jnd.lo.as_f64(), b.jnd.hi.as_f64()],
            pse: [b.pse.lo.as_f64(), b.pse.hi.as_f64()],
        });
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: String,
    pub statistic: f64,
    pub p: f64,
    pub exact: bool,
    pub n: usize,
}

impl From<&TestResult> for TestReport {
    fn from(t: &TestResult) -> Self {
        Self {
            method: t.method.clone(),
            statistic: t.statistic,
            p: t.p_value,
            exact: t.exact,
            n: t.n,
        }
    }
}
