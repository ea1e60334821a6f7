//! Three-axis acceleration to single-actuator drive.
//!
//! The chain is `highpass_filter` (per axis) → `dft321_reduce` →
//! `to_pwm_schedule`, all pure functions over owned values.

mod csv_io;
mod dft321;
mod filter;
mod pwm;

pub use csv_io::{
    read_accel_csv, read_csv_trace, write_accel_csv, write_pwm_csv, write_reduced_csv,
};
pub use dft321::{dft321_frame, dft321_reduce, Dft321, DEFAULT_FRAME_LEN};
pub use filter::{highpass_filter, Biquad, FilterKind, FilterSpec, HighPass};
pub use pwm::{to_pwm_schedule, to_pwm_schedule_with, PwmConfig, PwmSchedule};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Canonical ingest rate in samples per second.
pub const DEFAULT_SAMPLE_RATE: u32 = 1000;

/// Timestamped three-axis acceleration, m/s².
#[derive(Debug, Clone, PartialEq)]
pub struct AccelTrace<S> {
    sample_rate: u32,
    samples: Vec<[S; 3]>,
    label: Option<String>,
}

impl<S: Scalar> AccelTrace<S> {
    pub fn new(sample_rate: u32, samples: Vec<[S; 3]>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample_rate must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::EmptyInput("acceleration trace has no samples"));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| s.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            sample_rate,
            samples,
            label: None,
        })
    }

    /// Builds a trace from three equally long axis vectors.
    pub fn from_axes(sample_rate: u32, ax: &[S], ay: &[S], az: &[S]) -> Result<Self> {
        if ax.len() != ay.len() || ax.len() != az.len() {
            return Err(Error::invalid("axis lengths differ"));
        }
        let samples = ax
            .iter()
            .zip(ay)
            .zip(az)
            .map(|((&x, &y), &z)| [x, y, z])
            .collect();
        Self::new(sample_rate, samples)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[[S; 3]] {
        &self.samples
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn axis(&self, a: usize) -> Vec<S> {
        self.samples.iter().map(|s| s[a]).collect()
    }

    /// Root of the summed per-axis mean squares.
    pub fn vector_rms(&self) -> S {
        let n = S::from_usize_lossy(self.samples.len());
        let ss = self.samples.iter().fold(S::zero(), |acc, s| {
            acc + s[0] * s[0] + s[1] * s[1] + s[2] * s[2]
        });
        (ss / n).sqrt()
    }

    pub(crate) fn map_samples(&self, samples: Vec<[S; 3]>) -> Self {
        Self {
            sample_rate: self.sample_rate,
            samples,
            label: self.label.clone(),
        }
    }
}

/// Single-channel signal produced by the spectral reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSignal<S> {
    pub sample_rate: u32,
    pub values: Vec<S>,
    pub frame_len: usize,
}

impl<S: Scalar> ReducedSignal<S> {
    pub fn rms(&self) -> S {
        if self.values.is_empty() {
            return S::zero();
        }
        let ss = self.values.iter().fold(S::zero(), |acc, &v| acc + v * v);
        (ss / S::from_usize_lossy(self.values.len())).sqrt()
    }

    pub fn duration_s(&self) -> f64 {
        self.values.len() as f64 / f64::from(self.sample_rate)
    }
}

/// Band limits and physical record of the voice-coil actuator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorModel {
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    pub mass_g: f64,
    pub dims_mm: [f64; 3],
}

impl Default for ActuatorModel {
    fn default() -> Self {
        Self {
            band_lo_hz: 50.0,
            band_hi_hz: 500.0,
            mass_g: 1.8,
            dims_mm: [12.0, 12.0, 6.0],
        }
    }
}

impl ActuatorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.band_lo_hz > 0.0 && self.band_lo_hz < self.band_hi_hz) {
            return Err(Error::invalid("actuator band must satisfy 0 < lo < hi"));
        }
        Ok(())
    }
}
