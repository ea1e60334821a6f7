use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{AccelTrace, ReducedSignal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 256 samples at 1 kHz.
pub const DEFAULT_FRAME_LEN: usize = 256;

/// Frame-wise reducer holding planned transforms for one frame length.
///
/// Per bin the output magnitude is the root-sum-square of the three axis
/// magnitudes and the phase is that of the axis-sum spectrum. A bin where the
/// sum spectrum vanishes gets zero phase.
pub struct Dft321<S: Scalar> {
    frame_len: usize,
    forward: Arc<dyn Fft<S>>,
    inverse: Arc<dyn Fft<S>>,
}

impl<S: Scalar> Dft321<S> {
    pub fn new(frame_len: usize) -> Result<Self> {
        if frame_len == 0 || !frame_len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "frame_len must be a power of two, got {frame_len}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            frame_len,
            forward: planner.plan_fft_forward(frame_len),
            inverse: planner.plan_fft_inverse(frame_len),
        })
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    /// Reduces one frame; shorter inputs are zero-padded, output has
    /// `frame_len` samples.
    pub fn reduce_frame(&self, frame: &[[S; 3]]) -> Vec<S> {
        let n = self.frame_len;
        debug_assert!(frame.len() <= n);
        let mut spectra = vec![vec![Complex::new(S::zero(), S::zero()); n]; 3];
        for (i, s) in frame.iter().enumerate() {
            for (axis, spec) in spectra.iter_mut().enumerate() {
                spec[i].re = s[axis];
            }
        }
        for spec in &mut spectra {
            self.forward.process(spec);
        }

        let mut out: Vec<Complex<S>> = (0..n)
            .map(|k| {
                let (x, y, z) = (spectra[0][k], spectra[1][k], spectra[2][k]);
                let magnitude = (x.norm_sqr() + y.norm_sqr() + z.norm_sqr()).sqrt();
                let sum = x + y + z;
                let sum_mag = sum.norm();
                if sum_mag > S::zero() {
                    sum * (magnitude / sum_mag)
                } else {
                    Complex::new(magnitude, S::zero())
                }
            })
            .collect();
        self.inverse.process(&mut out);
        let scale = S::one() / S::from_usize_lossy(n);
        out.into_iter().map(|c| c.re * scale).collect()
    }

    pub fn reduce(&self, trace: &AccelTrace<S>) -> ReducedSignal<S> {
        let mut values = Vec::with_capacity(trace.len() + self.frame_len);
        for frame in trace.samples().chunks(self.frame_len) {
            values.extend(self.reduce_frame(frame));
        }
        values.truncate(trace.len());
        ReducedSignal {
            sample_rate: trace.sample_rate(),
            values,
            frame_len: self.frame_len,
        }
    }
}

/// Reduces a three-axis trace to one channel with non-overlapping
/// rectangular frames; the final partial frame is zero-padded and the output
/// trimmed back to the input length.
pub fn dft321_reduce<S: Scalar>(
    trace: &AccelTrace<S>,
    frame_len: usize,
) -> Result<ReducedSignal<S>> {
    if trace.is_empty() {
        return Err(Error::EmptyInput("acceleration trace has no samples"));
    }
    Ok(Dft321::new(frame_len)?.reduce(trace))
}

/// One-shot reduction of a single frame given as separate axes.
pub fn dft321_frame<S: Scalar>(ax: &[S], ay: &[S], az: &[S]) -> Result<Vec<S>> {
    if ax.len() != ay.len() || ax.len() != az.len() {
        return Err(Error::invalid("axis lengths differ"));
    }
    let reducer = Dft321::new(ax.len())?;
    let frame: Vec<[S; 3]> = (0..ax.len()).map(|i| [ax[i], ay[i], az[i]]).collect();
    Ok(reducer.reduce_frame(&frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct O(n²) DFT, independent of the FFT path.
    fn naive_dft(x: &[f64]) -> Vec<(f64, f64)> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold((0.0, 0.0), |(re, im), (t, &v)| {
                    let w = -2.0 * std::f64::consts::PI * (k * t % n) as f64 / n as f64;
                    (re + v * w.cos(), im + v * w.sin())
                })
            })
            .collect()
    }

    fn energy(c: (f64, f64)) -> f64 {
        c.0 * c.0 + c.1 * c.1
    }

    #[test]
    fn single_axis_is_identity() {
        let ax: Vec<f64> = (0..700).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let zeros = vec![0.0; ax.len()];
        let t = AccelTrace::from_axes(1000, &ax, &zeros, &zeros).unwrap();
        let r = dft321_reduce(&t, 256).unwrap();
        assert_eq!(r.values.len(), ax.len());
        for (a, b) in r.values.iter().zip(&ax) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn paired_impulses_give_scaled_impulse() {
        let mut ax = vec![0.0f64; 256];
        ax[0] = 1.0;
        let ay = ax.clone();
        let az = vec![0.0; 256];
        // Oracle: flat magnitude sqrt(1 + 1), zero phase (sum spectrum is 2).
        for c in naive_dft(&ax) {
            assert!((energy(c) - 1.0).abs() < 1e-12);
        }
        let out = dft321_frame(&ax, &ay, &az).unwrap();
        assert!((out[0] - 2f64.sqrt()).abs() < 1e-9);
        assert!(out[1..].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn rejects_non_power_of_two() {
        let t = AccelTrace::new(1000, vec![[0.0f64; 3]; 10]).unwrap();
        assert!(matches!(dft321_reduce(&t, 100), Err(Error::InvalidSpec(_))));
        assert!(matches!(dft321_reduce(&t, 0), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn cancelling_axes_keep_energy() {
        // ax = -ay: sum spectrum vanishes, zero phase is used.
        let ax: Vec<f64> = (0..64).map(|i| (i as f64 * 0.3).sin()).collect();
        let ay: Vec<f64> = ax.iter().map(|v| -v).collect();
        let az = vec![0.0; 64];
        let out = dft321_frame(&ax, &ay, &az).unwrap();
        let (eo, ex) = (
            naive_dft(&out).into_iter().map(energy).sum::<f64>(),
            naive_dft(&ax).into_iter().map(energy).sum::<f64>(),
        );
        assert!((eo - 2.0 * ex).abs() < 1e-9 * ex);
    }

    #[test]
    fn random_frames_preserve_bin_energy() {
        use rand::Rng;
        let mut rng = crate::rng::stream(321);
        for _ in 0..100 {
            let axes: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..64).map(|_| rng.random_range(-5.0..5.0)).collect())
                .collect();
            let out = dft321_frame(&axes[0], &axes[1], &axes[2]).unwrap();
            let spectra: Vec<Vec<(f64, f64)>> = axes.iter().map(|a| naive_dft(a)).collect();
            let total: f64 = spectra.iter().flatten().map(|&c| energy(c)).sum();
            for (k, c) in naive_dft(&out).into_iter().enumerate() {
                let expected: f64 = spectra.iter().map(|s| energy(s[k])).sum();
                assert!((energy(c) - expected).abs() < 1e-9 * total);
            }
        }
    }

    #[test]
    fn partial_final_frame_is_trimmed() {
        let t = AccelTrace::new(1000, vec![[1.0f64, 0.0, 0.0]; 300]).unwrap();
        let r = dft321_reduce(&t, 256).unwrap();
        assert_eq!(r.values.len(), 300);
        assert_eq!(r.frame_len, 256);
        assert!(r.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    proptest! {
        #[test]
        fn axis_permutation_keeps_magnitude(
            a in prop::collection::vec(-3.0f64..3.0, 32),
            b in prop::collection::vec(-3.0f64..3.0, 32),
            c in prop::collection::vec(-3.0f64..3.0, 32),
        ) {
            let base = naive_dft(&dft321_frame(&a, &b, &c).unwrap());
            let perm = naive_dft(&dft321_frame(&c, &a, &b).unwrap());
            let scale: f64 = base.iter().map(|&z| energy(z)).sum::<f64>().max(1.0);
            for (x, y) in base.iter().zip(&perm) {
                prop_assert!((energy(*x) - energy(*y)).abs() <= 1e-9 * scale);
            }
        }
    }
}
