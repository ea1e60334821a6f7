use super::AccelTrace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterKind {
    #[default]
    HighPass,
}

/// Butterworth filter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec<S> {
    pub kind: FilterKind,
    /// 2 or 4.
    pub order: u8,
    pub cutoff_hz: S,
}

impl<S: Scalar> Default for FilterSpec<S> {
    /// Second-order high-pass at 20 Hz, below the actuator's 50 Hz band edge.
    fn default() -> Self {
        Self {
            kind: FilterKind::HighPass,
            order: 2,
            cutoff_hz: S::lit(20.0),
        }
    }
}

impl<S: Scalar> FilterSpec<S> {
    pub fn highpass(order: u8, cutoff_hz: S) -> Self {
        Self {
            kind: FilterKind::HighPass,
            order,
            cutoff_hz,
        }
    }

    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        if self.order != 2 && self.order != 4 {
            return Err(Error::invalid(format!(
                "filter order must be 2 or 4, got {}",
                self.order
            )));
        }
        let nyquist = S::lit(f64::from(sample_rate) / 2.0);
        if !(self.cutoff_hz > S::zero() && self.cutoff_hz < nyquist) {
            return Err(Error::invalid(format!(
                "cutoff {} Hz must lie in (0, {nyquist}) Hz",
                self.cutoff_hz
            )));
        }
        Ok(())
    }
}

/// Direct-form II transposed second-order section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad<S> {
    b: [S; 3],
    a: [S; 2],
    z: [S; 2],
}

impl<S: Scalar> Biquad<S> {
    /// Bilinear transform of `s² / (s² + s/q + 1)` with the cutoff prewarped.
    pub fn highpass(cutoff_hz: S, sample_rate: S, q: S) -> Self {
        let k = (S::PI() * cutoff_hz / sample_rate).tan();
        let k2 = k * k;
        let one = S::one();
        let two = S::lit(2.0);
        let norm = one / (one + k / q + k2);
        Self {
            b: [norm, -two * norm, norm],
            a: [two * (k2 - one) * norm, (one - k / q + k2) * norm],
            z: [S::zero(); 2],
        }
    }

    #[inline]
    pub fn process(&mut self, x: S) -> S {
        let y = self.b[0] * x + self.z[0];
        self.z[0] = self.b[1] * x - self.a[0] * y + self.z[1];
        self.z[1] = self.b[2] * x - self.a[1] * y;
        y
    }

    pub fn reset(&mut self) {
        self.z = [S::zero(); 2];
    }
}

/// Cascade of Butterworth high-pass sections for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct HighPass<S> {
    sections: Vec<Biquad<S>>,
}

impl<S: Scalar> HighPass<S> {
    pub fn new(spec: &FilterSpec<S>, sample_rate: u32) -> Result<Self> {
        spec.validate(sample_rate)?;
        let fs = S::lit(f64::from(sample_rate));
        let n = usize::from(spec.order);
        let sections = (1..=n / 2)
            .map(|k| {
                let theta = S::PI() * S::from_usize_lossy(2 * k - 1) / S::from_usize_lossy(2 * n);
                let q = S::one() / (S::lit(2.0) * theta.sin());
                Biquad::highpass(spec.cutoff_hz, fs, q)
            })
            .collect();
        Ok(Self { sections })
    }

    #[inline]
    pub fn process(&mut self, x: S) -> S {
        self.sections.iter_mut().fold(x, |v, s| s.process(v))
    }

    pub fn reset(&mut self) {
        self.sections.iter_mut().for_each(Biquad::reset);
    }
}

/// Causal per-axis high-pass with the filter state starting at rest.
pub fn highpass_filter<S: Scalar>(
    trace: &AccelTrace<S>,
    spec: &FilterSpec<S>,
) -> Result<AccelTrace<S>> {
    if trace.is_empty() {
        return Err(Error::EmptyInput("acceleration trace has no samples"));
    }
    let proto = HighPass::new(spec, trace.sample_rate())?;
    let mut axes = [proto.clone(), proto.clone(), proto];
    let out = trace
        .samples()
        .iter()
        .map(|s| {
            [
                axes[0].process(s[0]),
                axes[1].process(s[1]),
                axes[2].process(s[2]),
            ]
        })
        .collect();
    Ok(trace.map_samples(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sine(freq: f64, fs: u32, secs: f64) -> Vec<f64> {
        let n = (secs * f64::from(fs)).round() as usize;
        (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / f64::from(fs)).sin())
            .collect()
    }

    fn steady_rms(v: &[f64], skip: usize) -> f64 {
        let tail = &v[skip..];
        (tail.iter().map(|x| x * x).sum::<f64>() / tail.len() as f64).sqrt()
    }

    /// Magnitude of the bilinear-transformed Butterworth high-pass.
    fn analytic_gain(f: f64, fc: f64, fs: f64, order: i32) -> f64 {
        use std::f64::consts::PI;
        let ratio = (PI * fc / fs).tan() / (PI * f / fs).tan();
        1.0 / (1.0 + ratio.powi(2 * order)).sqrt()
    }

    fn filter_axis(x: &[f64], order: u8, fc: f64, fs: u32) -> Vec<f64> {
        let zeros = vec![0.0; x.len()];
        let t = AccelTrace::from_axes(fs, x, &zeros, &zeros).unwrap();
        highpass_filter(&t, &FilterSpec::highpass(order, fc))
            .unwrap()
            .axis(0)
    }

    #[test]
    fn rejects_dc() {
        let t = AccelTrace::new(1000, vec![[9.81f64; 3]; 1000]).unwrap();
        let y = highpass_filter(&t, &FilterSpec::default()).unwrap();
        for s in &y.samples()[500..] {
            assert!(s.iter().all(|v| v.abs() < 1e-3));
        }
    }

    #[test]
    fn passband_gain_at_100hz() {
        let expected = analytic_gain(100.0, 20.0, 1000.0, 2);
        assert!(expected >= 0.98);
        let y = filter_axis(&sine(100.0, 1000, 2.0), 2, 20.0, 1000);
        let gain = steady_rms(&y, 1000) / std::f64::consts::FRAC_1_SQRT_2;
        assert!(gain >= 0.98, "gain {gain}");
        assert!((gain - expected).abs() < 5e-3, "gain {gain} vs {expected}");
    }

    #[test]
    fn stopband_attenuation_at_1hz() {
        let y = filter_axis(&sine(1.0, 1000, 5.0), 2, 20.0, 1000);
        let gain = steady_rms(&y, 1000) / std::f64::consts::FRAC_1_SQRT_2;
        let db = -20.0 * gain.log10();
        assert!(db >= 40.0, "attenuation {db} dB");
        let expected = analytic_gain(1.0, 20.0, 1000.0, 2);
        assert!((gain / expected - 1.0).abs() < 0.05);
    }

    #[test]
    fn fourth_order_matches_analytic_magnitude() {
        for f in [10.0, 20.0, 40.0, 150.0] {
            let y = filter_axis(&sine(f, 1000, 4.0), 4, 20.0, 1000);
            let gain = steady_rms(&y, 2000) / std::f64::consts::FRAC_1_SQRT_2;
            let expected = analytic_gain(f, 20.0, 1000.0, 4);
            assert!(
                (gain - expected).abs() < 0.01,
                "f={f}: {gain} vs {expected}"
            );
        }
    }

    #[test]
    fn cutoff_is_half_power() {
        let y = filter_axis(&sine(20.0, 1000, 4.0), 2, 20.0, 1000);
        let gain = steady_rms(&y, 2000) / std::f64::consts::FRAC_1_SQRT_2;
        assert!((gain - std::f64::consts::FRAC_1_SQRT_2).abs() < 5e-3);
    }

    #[test]
    fn invalid_specs() {
        let t = AccelTrace::new(1000, vec![[0.0f64; 3]; 8]).unwrap();
        for spec in [
            FilterSpec::highpass(2, 500.0),
            FilterSpec::highpass(2, 0.0),
            FilterSpec::highpass(3, 20.0),
        ] {
            assert!(matches!(
                highpass_filter(&t, &spec),
                Err(Error::InvalidSpec(_))
            ));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let t = AccelTrace::new(1000, vec![[1.0f32; 3]; 1000]).unwrap();
        let y = highpass_filter(&t, &FilterSpec::default()).unwrap();
        assert!(y.samples().last().unwrap()[0].abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn linear_time_invariant(
            a in prop::collection::vec(-10.0f64..10.0, 64),
            b in prop::collection::vec(-10.0f64..10.0, 64),
            c in -5.0f64..5.0,
            order in prop::sample::select(vec![2u8, 4]),
        ) {
            let fa = filter_axis(&a, order, 20.0, 1000);
            let fb = filter_axis(&b, order, 20.0, 1000);
            let scaled: Vec<f64> = a.iter().map(|v| c * v).collect();
            let fs = filter_axis(&scaled, order, 20.0, 1000);
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let fsum = filter_axis(&sum, order, 20.0, 1000);
            let scale = fa.iter().chain(&fb).fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..a.len() {
                prop_assert!((fs[i] - c * fa[i]).abs() <= 1e-9 * scale * c.abs().max(1.0));
                prop_assert!((fsum[i] - fa[i] - fb[i]).abs() <= 1e-9 * scale);
            }
        }
    }
}
