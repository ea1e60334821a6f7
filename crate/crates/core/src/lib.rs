//! Vibrotactile texture workbench core.
//!
//! The crate covers the whole desk-scale pipeline: the three-axis to
//! single-actuator signal chain ([`signal`]), synthetic sandpaper traces and
//! simulated observers ([`texture`]), constant-stimuli 2AFC sessions
//! ([`psych`]) and the statistics used to analyse them ([`stats`]).
//!
//! Numeric code in [`signal`] and the psychometric fitter is generic over
//! [`Scalar`]; the aliases below pin the common `f64` instantiations.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod rng;
pub mod scalar;

pub mod psych;
pub mod signal;
pub mod stats;
pub mod texture;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type AccelTrace = signal::AccelTrace<f64>;
pub type AccelTrace32 = signal::AccelTrace<f32>;
pub type FilterSpec = signal::FilterSpec<f64>;
pub type ReducedSignal = signal::ReducedSignal<f64>;
pub type ReducedSignal32 = signal::ReducedSignal<f32>;
pub type PwmSchedule = signal::PwmSchedule<f64>;
pub type PsychometricFit = stats::PsychometricFit<f64>;
pub type PsychometricFit32 = stats::PsychometricFit<f32>;
pub type BootstrapCI = stats::BootstrapCI<f64>;
