//! TOML workbench configuration; every section is optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vibes_core::signal::{Dft321, DEFAULT_SAMPLE_RATE};
use vibes_core::texture::{GritLevel, TextureModel};
use vibes_core::FilterSpec;

use crate::error::{Result, WorkbenchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub plan: u64,
    pub observer: u64,
    pub bootstrap: u64,
    pub texture: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            plan: 1,
            observer: 2,
            bootstrap: 3,
            texture: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub filter_order: u8,
    pub cutoff_hz: f64,
    pub frame_len: usize,
    pub pwm_gain: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        let f = FilterSpec::default();
        Self {
            filter_order: f.order,
            cutoff_hz: f.cutoff_hz,
            frame_len: vibes_core::signal::DEFAULT_FRAME_LEN,
            pwm_gain: 1.0,
        }
    }
}

impl SignalConfig {
    pub fn filter(&self) -> FilterSpec {
        FilterSpec::highpass(self.filter_order, self.cutoff_hz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StimulusConfig {
    pub reference: String,
    pub comparisons: Vec<String>,
    pub reps: usize,
    pub replicates: usize,
    pub duration_s: f64,
}

impl Default for StimulusConfig {
    fn default() -> Self {
        Self {
            reference: vibes_core::texture::REFERENCE_GRIT.into(),
            comparisons: ["P1000", "P220", "P120", "P80", "P60"]
                .map(String::from)
                .to_vec(),
            reps: 20,
            replicates: vibes_core::psych::DEFAULT_REPLICATES,
            duration_s: 2.0,
        }
    }
}

impl StimulusConfig {
    pub fn reference_grit(&self) -> Result<GritLevel> {
        Ok(GritLevel::canonical(&self.reference)?)
    }

    pub fn comparison_grits(&self) -> Result<Vec<GritLevel>> {
        parse_grits(&self.comparisons)
    }
}

pub fn parse_grits<S: AsRef<str>>(names: &[S]) -> Result<Vec<GritLevel>> {
    names
        .iter()
        .map(|g| GritLevel::canonical(g.as_ref().trim()).map_err(Into::into))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub port: u16,
    pub journal_dir: PathBuf,
    pub stimulus_ms: u64,
    pub gap_ms: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            port: 8080,
            journal_dir: PathBuf::from("journal"),
            stimulus_ms: 2000,
            gap_ms: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkbenchConfig {
    pub seeds: Seeds,
    pub signal: SignalConfig,
    pub stimuli: StimulusConfig,
    pub bootstrap_resamples: usize,
    pub service: ServiceConfig,
}

impl WorkbenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| WorkbenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| WorkbenchError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Default config, or the file at `path` when given.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.filter().validate(DEFAULT_SAMPLE_RATE)?;
        Dft321::<f64>::new(self.signal.frame_len)?;
        if !(self.signal.pwm_gain > 0.0) || !self.signal.pwm_gain.is_finite() {
            return Err(WorkbenchError::Config("signal.pwm_gain must be > 0".into()));
        }
        self.stimuli.reference_grit()?;
        if self.stimuli.comparison_grits()?.is_empty() {
            return Err(WorkbenchError::Config(
                "stimuli.comparisons is empty".into(),
            ));
        }
        if self.stimuli.reps == 0 || self.stimuli.replicates == 0 {
            return Err(WorkbenchError::Config(
                "stimuli.reps and stimuli.replicates must be >= 1".into(),
            ));
        }
        if !(self.stimuli.duration_s > 0.0) {
            return Err(WorkbenchError::Config(
                "stimuli.duration_s must be > 0".into(),
            ));
        }
        self.texture_model().validate()?;
        Ok(())
    }

    pub fn texture_model(&self) -> TextureModel {
        TextureModel::default().with_seed(self.seeds.texture)
    }
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        Self {
            seeds: Seeds::default(),
            signal: SignalConfig::default(),
            stimuli: StimulusConfig::default(),
            bootstrap_resamples: vibes_core::stats::DEFAULT_RESAMPLES,
            service: ServiceConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(
            WorkbenchConfig::from_toml("").unwrap(),
            WorkbenchConfig::default()
        );
    }

    #[test]
    fn partial_sections_merge() {
        let cfg = WorkbenchConfig::from_toml(
            "bootstrap_resamples = 500\n[signal]\nfilter_order = 4\n[service]\nport = 9001\n",
        )
        .unwrap();
        assert_eq!(cfg.bootstrap_resamples, 500);
        assert_eq!(cfg.signal.filter_order, 4);
        assert_eq!(cfg.signal.cutoff_hz, 20.0);
        assert_eq!(cfg.service.port, 9001);
        assert_eq!(cfg.service.gap_ms, 500);
    }

    #[test]
    fn rejects_invalid_values() {
        for bad in [
            "[signal]\nfilter_order = 3",
            "[signal]\ncutoff_hz = 600.0",
            "[signal]\nframe_len = 100",
            "[signal]\npwm_gain = 0.0",
            "[stimuli]\ncomparisons = [\"P999\"]",
            "[stimuli]\ncomparisons = []",
            "[stimuli]\nreps = 0",
            "[seeds]\nunknown = 1",
            "port = 1",
        ] {
            assert!(WorkbenchConfig::from_toml(bad).is_err(), "{bad}");
        }
    }
}
