//! Simulated 2AFC responders.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{dft321_reduce, highpass_filter, AccelTrace, FilterSpec, DEFAULT_FRAME_LEN};
use crate::stats::Link;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    Reference,
    Comparison,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObserverKind {
    /// Ground-truth psychometric function on the comparison particle size.
    Analytic { beta0: f64, beta1: f64, link: Link },
    /// Compares perceived RMS intensity of the rendered signals.
    SignalChain {
        sigma: f64,
        filter: FilterSpec<f64>,
        frame_len: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverModel {
    pub kind: ObserverKind,
    pub seed: u64,
}

impl ObserverModel {
    pub fn analytic(beta0: f64, beta1: f64, seed: u64) -> Self {
        Self {
            kind: ObserverKind::Analytic {
                beta0,
                beta1,
                link: Link::Logit,
            },
            seed,
        }
    }

    /// Probit observer parameterised by its JND and PSE.
    pub fn probit(jnd: f64, pse: f64, seed: u64) -> Self {
        let beta1 = 1.0 / jnd;
        Self {
            kind: ObserverKind::Analytic {
                beta0: -pse * beta1,
                beta1,
                link: Link::Probit,
            },
            seed,
        }
    }

    pub fn signal_chain(sigma: f64, seed: u64) -> Self {
        Self {
            kind: ObserverKind::SignalChain {
                sigma,
                filter: FilterSpec::default(),
                frame_len: DEFAULT_FRAME_LEN,
            },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ObserverKind::Analytic { beta0, beta1, .. } => {
                if !beta0.is_finite() || !beta1.is_finite() {
                    return Err(Error::invalid(
                        "analytic observer parameters must be finite",
                    ));
                }
            }
            ObserverKind::SignalChain { sigma, .. } => {
                if !(*sigma >= 0.0) || !sigma.is_finite() {
                    return Err(Error::invalid("internal noise sigma must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Picks the comparison with probability `F(β0 + β1·comp_um)`; the
/// reference is absorbed into `β0`.
pub fn analytic_observer_respond<R: Rng + ?Sized>(
    _ref_um: f64,
    comp_um: f64,
    obs: &ObserverModel,
    rng: &mut R,
) -> Result<Choice> {
    let ObserverKind::Analytic { beta0, beta1, link } = obs.kind else {
        return Err(Error::KindMismatch {
            expected: "analytic",
        });
    };
    let p: f64 = link.cdf(beta0 + beta1 * comp_um);
    Ok(if rng.random::<f64>() < p {
        Choice::Comparison
    } else {
        Choice::Reference
    })
}

/// RMS of the filtered, reduced signal.
pub fn perceived_intensity(trace: &AccelTrace<f64>, obs: &ObserverModel) -> Result<f64> {
    let ObserverKind::SignalChain {
        filter, frame_len, ..
    } = &obs.kind
    else {
        return Err(Error::KindMismatch {
            expected: "signal-chain",
        });
    };
    if trace.is_empty() {
        return Err(Error::EmptyInput("acceleration trace has no samples"));
    }
    let filtered = highpass_filter(trace, filter)?;
    Ok(dft321_reduce(&filtered, *frame_len)?.rms())
}

/// Noisy intensity comparison on precomputed intensities.
pub fn signal_chain_respond_intensity<R: Rng + ?Sized>(
    ref_intensity: f64,
    comp_intensity: f64,
    sigma: f64,
    rng: &mut R,
) -> Choice {
    let mut perceive = |i: f64| {
        let z: f64 = StandardNormal.sample(rng);
        i * (1.0 + sigma * z)
    };
    let (r, c) = (perceive(ref_intensity), perceive(comp_intensity));
    if c > r {
        Choice::Comparison
    } else if r > c {
        Choice::Reference
    } else if rng.random::<bool>() {
        Choice::Comparison
    } else {
        Choice::Reference
    }
}

pub fn signal_chain_respond<R: Rng + ?Sized>(
    ref_trace: &AccelTrace<f64>,
    comp_trace: &AccelTrace<f64>,
    obs: &ObserverModel,
    rng: &mut R,
) -> Result<Choice> {
    let ObserverKind::SignalChain { sigma, .. } = obs.kind else {
        return Err(Error::KindMismatch {
            expected: "signal-chain",
        });
    };
    let i_ref = perceived_intensity(ref_trace, obs)?;
    let i_comp = perceived_intensity(comp_trace, obs)?;
    Ok(signal_chain_respond_intensity(i_ref, i_comp, sigma, rng))
}
