use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::GritLevel;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;
use crate::signal::{AccelTrace, ActuatorModel, DEFAULT_SAMPLE_RATE};

/// Band-limited noise model of a sandpaper scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureModel {
    pub scan_speed_mps: f64,
    /// Vector RMS acceleration per micrometre of particle size, m/s²/µm.
    pub base_rms: f64,
    /// Spectral slope exponent applied to the amplitude spectrum (0 = white).
    pub noise_color: f64,
    pub seed: u64,
    pub sample_rate: u32,
    /// Width of the spectral bump in octaves (one standard deviation).
    pub bandwidth_oct: f64,
    /// Relative RMS share of (x, y, z); z is normal to the surface.
    pub axis_weights: [f64; 3],
    pub actuator: ActuatorModel,
}

impl Default for TextureModel {
    fn default() -> Self {
        Self {
            scan_speed_mps: 0.1,
            base_rms: 0.02,
            noise_color: -0.5,
            seed: 0,
            sample_rate: DEFAULT_SAMPLE_RATE,
            bandwidth_oct: 0.5,
            axis_weights: [0.6, 0.6, 1.0],
            actuator: ActuatorModel::default(),
        }
    }
}

impl TextureModel {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scan_speed_mps > 0.0) {
            return Err(Error::invalid("scan_speed_mps must be positive"));
        }
        if !(self.base_rms > 0.0) {
            return Err(Error::invalid("base_rms must be positive"));
        }
        if self.sample_rate == 0 || !(self.bandwidth_oct > 0.0) || !self.noise_color.is_finite() {
            return Err(Error::invalid(
                "texture model needs a positive rate and bandwidth",
            ));
        }
        if self.axis_weights.iter().any(|w| !(*w >= 0.0))
            || self.axis_weights.iter().all(|w| *w == 0.0)
        {
            return Err(Error::invalid(
                "axis weights must be non-negative and not all zero",
            ));
        }
        self.actuator.validate()
    }

    /// Spatial-frequency cue: scan speed over particle spacing (twice the
    /// particle size), limited to the actuator band and below Nyquist.
    pub fn center_frequency_hz(&self, particle_um: f64) -> f64 {
        let spacing_m = 2.0 * particle_um * 1e-6;
        let hi = self
            .actuator
            .band_hi_hz
            .min(0.45 * f64::from(self.sample_rate));
        (self.scan_speed_mps / spacing_m).clamp(self.actuator.band_lo_hz, hi)
    }

    pub fn target_rms(&self, grit: &GritLevel) -> f64 {
        self.base_rms * grit.particle_um
    }
}

/// Three-axis trace whose vector RMS is exactly `base_rms · particle_um`,
/// with energy confined to the actuator band around the grit's centre
/// frequency. Deterministic in `model.seed`.
pub fn synthesize_texture_trace<S: Scalar>(
    grit: &GritLevel,
    duration_s: f64,
    model: &TextureModel,
) -> Result<AccelTrace<S>> {
    model.validate()?;
    if !(duration_s > 0.0) || !duration_s.is_finite() {
        return Err(Error::invalid(format!(
            "duration {duration_s} s must be positive"
        )));
    }
    let fs = f64::from(model.sample_rate);
    let n = (duration_s * fs).round() as usize;
    if n == 0 {
        return Err(Error::invalid("duration shorter than one sample"));
    }
    let center = model.center_frequency_hz(grit.particle_um);
    let nyquist = fs / 2.0;
    let band_hi = model.actuator.band_hi_hz.min(nyquist);
    let gain = |f: f64| -> f64 {
        if f < model.actuator.band_lo_hz || f > band_hi || f <= 0.0 {
            return 0.0;
        }
        let oct = (f / center).log2() / model.bandwidth_oct;
        (-0.5 * oct * oct).exp() * (f / center).powf(model.noise_color)
    };

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut stream = rng::stream(model.seed);
    let weight_norm = model.axis_weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let target = model.target_rms(grit);

    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(3);
    for &w in &model.axis_weights {
        let mut buf: Vec<Complex<f64>> = (0..n)
            .map(|_| Complex::new(StandardNormal.sample(&mut stream), 0.0))
            .collect();
        fwd.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            let bin = k.min(n - k);
            *c *= gain(bin as f64 * fs / n as f64);
        }
        inv.process(&mut buf);
        let mut axis: Vec<f64> = buf.iter().map(|c| c.re / n as f64).collect();
        let rms = (axis.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        let want = target * w / weight_norm;
        let scale = if rms > 0.0 { want / rms } else { 0.0 };
        axis.iter_mut().for_each(|v| *v *= scale);
        axes.push(axis);
    }
    let samples = (0..n)
        .map(|i| [S::lit(axes[0][i]), S::lit(axes[1][i]), S::lit(axes[2][i])])
        .collect();
    Ok(AccelTrace::new(model.sample_rate, samples)?.with_label(grit.p_grade.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::texture::canonical_grits;

    fn grit(g: &str) -> GritLevel {
        GritLevel::canonical(g).unwrap()
    }

    #[test]
    fn length_and_determinism() {
        let m = TextureModel::default().with_seed(4);
        let a: AccelTrace<f64> = synthesize_texture_trace(&grit("P80"), 2.0, &m).unwrap();
        assert_eq!(a.len(), 2000);
        let b: AccelTrace<f64> = synthesize_texture_trace(&grit("P80"), 2.0, &m).unwrap();
        assert_eq!(a, b);
        let c: AccelTrace<f64> =
            synthesize_texture_trace(&grit("P80"), 2.0, &m.clone().with_seed(5)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rms_is_monotone_in_particle_size() {
        let rms = |g: &str, seed: u64| {
            let t: AccelTrace<f64> =
                synthesize_texture_trace(&grit(g), 1.0, &TextureModel::default().with_seed(seed))
                    .unwrap();
            t.vector_rms()
        };
        for seed in 0..20 {
            let (p60, p120, p1000) = (rms("P60", seed), rms("P120", seed), rms("P1000", seed));
            assert!(p60 > p120 && p120 > p1000, "seed {seed}");
            assert!((p60 - 0.02 * 264.0).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_stays_in_actuator_band() {
        let m = TextureModel::default().with_seed(1);
        for g in canonical_grits() {
            let t: AccelTrace<f64> = synthesize_texture_trace(&g, 1.0, &m).unwrap();
            let x = t.axis(2);
            let n = x.len();
            let mut planner = FftPlanner::<f64>::new();
            let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
            planner.plan_fft_forward(n).process(&mut buf);
            let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
            let out_of_band: f64 = buf
                .iter()
                .enumerate()
                .filter(|(k, _)| {
                    let f = (*k).min(n - *k) as f64;
                    f < 50.0
                })
                .map(|(_, c)| c.norm_sqr())
                .sum();
            assert!(out_of_band < 1e-20 * total.max(1.0));
            let centroid: f64 = buf[..n / 2]
                .iter()
                .enumerate()
                .map(|(k, c)| k as f64 * c.norm_sqr())
                .sum::<f64>()
                / buf[..n / 2].iter().map(|c| c.norm_sqr()).sum::<f64>();
            let center = m.center_frequency_hz(g.particle_um);
            assert!(
                (centroid / center).log2().abs() < 0.75,
                "{}: {centroid} vs {center}",
                g.p_grade
            );
        }
    }

    #[test]
    fn rejects_bad_duration() {
        let m = TextureModel::default();
        assert!(synthesize_texture_trace::<f64>(&grit("P60"), 0.0, &m).is_err());
        assert!(synthesize_texture_trace::<f64>(&grit("P60"), -1.0, &m).is_err());
    }

    #[test]
    fn centre_frequency_is_clipped() {
        let m = TextureModel::default();
        assert!((m.center_frequency_hz(264.0) - 0.1 / 528e-6).abs() < 1e-9);
        assert_eq!(m.center_frequency_hz(18.0), 450.0);
        assert_eq!(m.center_frequency_hz(10_000.0), 50.0);
    }
}
