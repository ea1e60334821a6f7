//! Maximum-likelihood psychometric functions `P(Y=1) = F(β0 + β1·x)`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest slope magnitude reported; separated data are clamped here.
pub const SLOPE_MAX: f64 = 1e3;
/// Smallest slope magnitude reported; a flat psychometric function is
/// clamped here so that `jnd = 1/|β1|` stays finite.
pub const SLOPE_MIN: f64 = 1e-9;
pub const PARAM_TOL: f64 = 1e-8;
pub const MAX_ITER: usize = 100;
/// Relative log-likelihood drop treated as rounding noise when accepting a step.
pub const LL_ROUNDING: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    #[default]
    Logit,
    Probit,
}

impl std::str::FromStr for Link {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logit" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            other => Err(Error::invalid(format!("unknown link `{other}`"))),
        }
    }
}

impl std::fmt::Display for Link {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
        })
    }
}

pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

impl Link {
    /// `(F(η), 1 − F(η))`, each computed without cancellation.
    pub fn probabilities<S: Scalar>(self, eta: S) -> (S, S) {
        match self {
            Link::Logit => {
                let one = S::one();
                (one / (one + (-eta).exp()), one / (one + eta.exp()))
            }
            Link::Probit => {
                let e = eta.as_f64();
                (S::lit(std_normal_cdf(e)), S::lit(std_normal_cdf(-e)))
            }
        }
    }

    pub fn cdf<S: Scalar>(self, eta: S) -> S {
        self.probabilities(eta).0
    }

    fn density<S: Scalar>(self, eta: S) -> S {
        match self {
            Link::Logit => {
                let (p, q) = self.probabilities(eta);
                p * q
            }
            Link::Probit => S::lit(std_normal_pdf(eta.as_f64())),
        }
    }
}

/// Fitted psychometric function. `jnd = 1/|β1|` and `pse = −β0/β1` hold on
/// every returned value, including clamped ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PsychometricFit<S> {
    pub link: Link,
    pub beta0: S,
    pub beta1: S,
    pub jnd: S,
    pub pse: S,
    pub log_likelihood: S,
    pub converged: bool,
    pub n_trials: usize,
    pub iterations: usize,
}

impl<S: Scalar> PsychometricFit<S> {
    pub fn predict(&self, x: S) -> S {
        self.link.cdf(self.beta0 + self.beta1 * x)
    }
}

/// Per-iteration record of a fit.
#[derive(Debug, Clone, Default)]
pub struct FitDiagnostics<S> {
    pub log_likelihood_path: Vec<S>,
    pub separated: bool,
}

/// Binomial counts at one stimulus level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level<S> {
    pub x: S,
    pub n: usize,
    pub k: usize,
}

/// Collapses `(x, y)` trials into per-level counts sorted by `x`.
pub fn group_trials<S: Scalar>(trials: &[(S, bool)]) -> Vec<Level<S>> {
    let mut sorted: Vec<(S, bool)> = trials.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite stimulus values"));
    let mut levels: Vec<Level<S>> = Vec::new();
    for (x, y) in sorted {
        match levels.last_mut() {
            Some(l) if l.x == x => {
                l.n += 1;
                l.k += usize::from(y);
            }
            _ => levels.push(Level {
                x,
                n: 1,
                k: usize::from(y),
            }),
        }
    }
    levels
}

/// Log-likelihood of `(β0, β1)` on grouped data.
pub fn log_likelihood<S: Scalar>(levels: &[Level<S>], link: Link, beta0: S, beta1: S) -> S {
    levels.iter().fold(S::zero(), |acc, l| {
        let (p, q) = link.probabilities(beta0 + beta1 * l.x);
        let k = S::from_usize_lossy(l.k);
        let m = S::from_usize_lossy(l.n - l.k);
        let mut ll = acc;
        if l.k > 0 {
            ll = ll + k * p.ln();
        }
        if l.n > l.k {
            ll = ll + m * q.ln();
        }
        ll
    })
}

/// True when some cut between levels puts only 0-responses on one side and
/// only 1-responses on the other, i.e. no finite MLE exists.
fn is_separated<S>(levels: &[Level<S>]) -> bool {
    let all_zero = |ls: &[Level<S>]| ls.iter().all(|l| l.k == 0);
    let all_one = |ls: &[Level<S>]| ls.iter().all(|l| l.k == l.n);
    (0..levels.len()).any(|c| {
        let (below, above) = (&levels[..c], &levels[c + 1..]);
        (all_zero(below) && all_one(above)) || (all_one(below) && all_zero(above))
    })
}

pub fn fit_psychometric<S: Scalar>(trials: &[(S, bool)], link: Link) -> Result<PsychometricFit<S>> {
    fit_grouped(&group_trials(trials), link).map(|(fit, _)| fit)
}

pub fn fit_psychometric_diagnostics<S: Scalar>(
    trials: &[(S, bool)],
    link: Link,
) -> Result<(PsychometricFit<S>, FitDiagnostics<S>)> {
    fit_grouped(&group_trials(trials), link)
}

/// Newton–Raphson with step halving on a standardised stimulus axis.
pub fn fit_grouped<S: Scalar>(
    levels: &[Level<S>],
    link: Link,
) -> Result<(PsychometricFit<S>, FitDiagnostics<S>)> {
    if levels.is_empty() {
        return Err(Error::EmptyInput("no trials"));
    }
    if levels.len() < 2 {
        return Err(Error::NonIdentifiable(
            "at least two distinct stimulus levels are required".into(),
        ));
    }
    if levels.iter().any(|l| !l.x.is_finite()) {
        return Err(Error::invalid("stimulus values must be finite"));
    }
    let n_trials: usize = levels.iter().map(|l| l.n).sum();
    let total = S::from_usize_lossy(n_trials);
    let mean = levels
        .iter()
        .fold(S::zero(), |a, l| a + S::from_usize_lossy(l.n) * l.x)
        / total;
    let var = levels.iter().fold(S::zero(), |a, l| {
        let d = l.x - mean;
        a + S::from_usize_lossy(l.n) * d * d
    }) / total;
    let scale = var.sqrt();
    let std_levels: Vec<Level<S>> = levels
        .iter()
        .map(|l| Level {
            x: (l.x - mean) / scale,
            ..*l
        })
        .collect();

    let separated = is_separated(levels);
    // Beyond this linear-predictor magnitude every probability has saturated.
    let eta_cap = S::lit(40.0);
    let mut gamma = [S::zero(), S::zero()];
    let mut ll = log_likelihood(&std_levels, link, gamma[0], gamma[1]);
    let mut path = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    let tol = S::lit(PARAM_TOL);
    let half = S::lit(0.5);
    let ll_slack = S::lit(LL_ROUNDING);

    while iterations < MAX_ITER {
        iterations += 1;
        let (grad, info) = score_and_information(&std_levels, link, gamma);
        let det = info[0] * info[2] - info[1] * info[1];
        if !(det > S::zero()) || !det.is_finite() {
            break;
        }
        let mut step = [
            (info[2] * grad[0] - info[1] * grad[1]) / det,
            (info[0] * grad[1] - info[1] * grad[0]) / det,
        ];
        let mut accepted = None;
        for _ in 0..40 {
            let cand = [gamma[0] + step[0], gamma[1] + step[1]];
            let cand_ll = log_likelihood(&std_levels, link, cand[0], cand[1]);
            // Near the optimum the likelihood is flat to rounding.
            if cand_ll.is_finite() && cand_ll >= ll - ll_slack * (S::one() + ll.abs()) {
                accepted = Some((cand, cand_ll));
                break;
            }
            step = [step[0] * half, step[1] * half];
        }
        let Some((cand, cand_ll)) = accepted else {
            // No ascent direction left at working precision.
            converged = !separated;
            break;
        };
        let change = step[0].abs().max(step[1].abs());
        gamma = cand;
        ll = cand_ll;
        path.push(ll);
        if change < tol {
            converged = true;
            break;
        }
        if separated && (gamma[0].abs() + gamma[1].abs()) > eta_cap {
            break;
        }
    }
    if separated {
        converged = false;
    }

    let mut beta1 = gamma[1] / scale;
    let mut beta0 = gamma[0] - beta1 * mean;
    let (lo, hi) = (S::lit(SLOPE_MIN), S::lit(SLOPE_MAX));
    let magnitude = beta1.abs();
    if magnitude > hi || magnitude < lo || !magnitude.is_finite() {
        let sign = if beta1 < S::zero() {
            -S::one()
        } else {
            S::one()
        };
        let clamped = if magnitude > hi || !magnitude.is_finite() {
            hi
        } else {
            lo
        };
        // Keep the fitted midpoint whenever it is meaningful.
        let pse = if magnitude > S::zero() && magnitude.is_finite() {
            -beta0 / beta1
        } else {
            mean
        };
        beta1 = sign * clamped;
        beta0 = -beta1 * pse;
        converged = false;
    }
    let jnd = S::one() / beta1.abs();
    let pse = -beta0 / beta1;
    let log_likelihood = log_likelihood(levels, link, beta0, beta1);

    Ok((
        PsychometricFit {
            link,
            beta0,
            beta1,
            jnd,
            pse,
            log_likelihood,
            converged,
            n_trials,
            iterations,
        },
        FitDiagnostics {
            log_likelihood_path: path,
            separated,
        },
    ))
}

/// Score vector and observed information matrix, stored as
/// `[i00, i01, i11]`. Probit levels whose observed weight is not positive
/// fall back to the expected (Fisher) weight.
fn score_and_information<S: Scalar>(
    levels: &[Level<S>],
    link: Link,
    gamma: [S; 2],
) -> ([S; 2], [S; 3]) {
    let mut g = [S::zero(); 2];
    let mut info = [S::zero(); 3];
    let tiny = S::lit(1e-300);
    for l in levels {
        let eta = gamma[0] + gamma[1] * l.x;
        let (p, q) = link.probabilities(eta);
        let n = S::from_usize_lossy(l.n);
        let k = S::from_usize_lossy(l.k);
        let (u, w) = match link {
            Link::Logit => (k - n * p, n * p * q),
            Link::Probit => {
                let dens = link.density(eta);
                let pq = (p * q).max(tiny);
                let resid = k - n * p;
                let expected = n * dens * dens / pq;
                // Observed information: f' = −η f for the normal density.
                let ratio_slope = -eta * dens / pq - dens * dens * (q - p) / (pq * pq);
                let observed = expected - resid * ratio_slope;
                (
                    resid * dens / pq,
                    if observed > S::zero() {
                        observed
                    } else {
                        expected
                    },
                )
            }
        };
        g[0] = g[0] + u;
        g[1] = g[1] + u * l.x;
        info[0] = info[0] + w;
        info[1] = info[1] + w * l.x;
        info[2] = info[2] + w * l.x * l.x;
    }
    (g, info)
}
