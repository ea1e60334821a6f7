use super::ReducedSignal;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bipolar drive mapping around a 50% rest duty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwmConfig {
    pub update_rate_hz: u32,
    pub carrier_hz: u32,
    /// Amplitude (m/s²) that maps to full swing at unit gain.
    pub a_ref: f64,
    pub duty_min: f64,
    pub duty_max: f64,
}

impl Default for PwmConfig {
    fn default() -> Self {
        Self {
            update_rate_hz: 1000,
            carrier_hz: 5000,
            a_ref: 10.0,
            duty_min: 0.05,
            duty_max: 0.95,
        }
    }
}

impl PwmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.update_rate_hz == 0 || self.carrier_hz < self.update_rate_hz {
            return Err(Error::invalid(
                "PWM carrier must be at least the update rate",
            ));
        }
        if !(self.a_ref > 0.0) {
            return Err(Error::invalid("a_ref must be positive"));
        }
        if !(0.0 <= self.duty_min
            && self.duty_min < 0.5
            && 0.5 < self.duty_max
            && self.duty_max <= 1.0)
        {
            return Err(Error::invalid(
                "duty clamp must bracket the 0.5 rest point inside [0, 1]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PwmSchedule<S> {
    pub update_rate_hz: u32,
    pub carrier_hz: u32,
    pub duties: Vec<S>,
}

pub fn to_pwm_schedule<S: Scalar>(sig: &ReducedSignal<S>, gain: S) -> Result<PwmSchedule<S>> {
    to_pwm_schedule_with(sig, gain, &PwmConfig::default())
}

/// Mean-decimates `sig` to the update rate and maps each value to a clamped
/// duty fraction.
pub fn to_pwm_schedule_with<S: Scalar>(
    sig: &ReducedSignal<S>,
    gain: S,
    cfg: &PwmConfig,
) -> Result<PwmSchedule<S>> {
    cfg.validate()?;
    if !(gain > S::zero()) || !gain.is_finite() {
        return Err(Error::invalid(format!("gain must be positive, got {gain}")));
    }
    if sig.sample_rate < cfg.update_rate_hz {
        return Err(Error::invalid(format!(
            "signal rate {} Hz is below the PWM update rate {} Hz",
            sig.sample_rate, cfg.update_rate_hz
        )));
    }
    let fs = u64::from(sig.sample_rate);
    let up = u64::from(cfg.update_rate_hz);
    let n = sig.values.len() as u64;
    let slots = (n * up).div_ceil(fs) as usize;

    let mut sums = vec![S::zero(); slots];
    let mut counts = vec![0usize; slots];
    for (i, &v) in sig.values.iter().enumerate() {
        let slot = (i as u64 * up / fs) as usize;
        sums[slot] = sums[slot] + v;
        counts[slot] += 1;
    }

    let half = S::lit(0.5);
    let (lo, hi) = (S::lit(cfg.duty_min), S::lit(cfg.duty_max));
    let a_ref = S::lit(cfg.a_ref);
    let duties = sums
        .into_iter()
        .zip(counts)
        .map(|(s, c)| {
            let mean = s / S::from_usize_lossy(c);
            (half + half * gain * mean / a_ref).max(lo).min(hi)
        })
        .collect();
    Ok(PwmSchedule {
        update_rate_hz: cfg.update_rate_hz,
        carrier_hz: cfg.carrier_hz,
        duties,
    })
}
