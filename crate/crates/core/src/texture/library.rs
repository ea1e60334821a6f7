use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{synthesize_texture_trace, GritLevel, TextureModel};
use crate::error::{Error, Result};
use crate::rng;
use crate::signal::{read_accel_csv, write_accel_csv, AccelTrace};

/// Default recording length per saved stimulus.
pub const DEFAULT_DURATION_S: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LibraryEntry {
    pub label: String,
    pub grit: GritLevel,
    pub replicate: usize,
    pub seed: u64,
    pub trace: AccelTrace<f64>,
}

/// One row of the library manifest JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub label: String,
    pub grit_p_grade: String,
    pub particle_um: f64,
    pub seed: u64,
    pub csv_path: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StimulusLibrary {
    pub entries: Vec<LibraryEntry>,
}

pub fn label_for(grit: &GritLevel, replicate: usize) -> String {
    format!("{}-r{replicate}", grit.p_grade)
}

/// Inverse of the `<grade>-r<replicate>` labels.
pub fn parse_label(label: &str) -> Result<(String, usize)> {
    let (grade, rep) = label
        .rsplit_once("-r")
        .ok_or_else(|| Error::invalid(format!("label `{label}` is not <grade>-r<replicate>")))?;
    let rep = rep
        .parse()
        .map_err(|_| Error::invalid(format!("label `{label}` has a bad replicate index")))?;
    Ok((grade.to_string(), rep))
}

/// `per_grit` traces per grit, each from its own derived seed.
pub fn build_stimulus_library(
    grits: &[GritLevel],
    per_grit: usize,
    model: &TextureModel,
) -> Result<StimulusLibrary> {
    build_stimulus_library_with(grits, per_grit, DEFAULT_DURATION_S, model)
}

pub fn build_stimulus_library_with(
    grits: &[GritLevel],
    per_grit: usize,
    duration_s: f64,
    model: &TextureModel,
) -> Result<StimulusLibrary> {
    if grits.is_empty() {
        return Err(Error::invalid("grit list is empty"));
    }
    if per_grit == 0 {
        return Err(Error::invalid("per_grit must be at least 1"));
    }
    let mut entries = Vec::with_capacity(grits.len() * per_grit);
    for (gi, grit) in grits.iter().enumerate() {
        if grits[..gi].iter().any(|g| g.p_grade == grit.p_grade) {
            return Err(Error::invalid(format!(
                "grit {} listed twice",
                grit.p_grade
            )));
        }
        for replicate in 0..per_grit {
            let seed = rng::derive(model.seed, (gi * 1_000_003 + replicate) as u64);
            let m = model.clone().with_seed(seed);
            let label = label_for(grit, replicate);
            let trace = synthesize_texture_trace(grit, duration_s, &m)?.with_label(label.clone());
            entries.push(LibraryEntry {
                label,
                grit: grit.clone(),
                replicate,
                seed,
                trace,
            });
        }
    }
    Ok(StimulusLibrary { entries })
}

impl StimulusLibrary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, particle_um: f64, replicate: usize) -> Option<&LibraryEntry> {
        self.entries
            .iter()
            .find(|e| e.grit.particle_um == particle_um && e.replicate == replicate)
    }

    pub fn replicates(&self, particle_um: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| e.grit.particle_um == particle_um)
            .count()
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.entries
            .iter()
            .map(|e| ManifestEntry {
                label: e.label.clone(),
                grit_p_grade: e.grit.p_grade.clone(),
                particle_um: e.grit.particle_um,
                seed: e.seed,
                csv_path: format!("{}.csv", e.label),
            })
            .collect()
    }

    /// Writes one CSV per trace plus `manifest.json` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<ManifestEntry>> {
        fs::create_dir_all(dir)?;
        let manifest = self.manifest();
        for (entry, row) in self.entries.iter().zip(&manifest) {
            let file = fs::File::create(dir.join(&row.csv_path))?;
            write_accel_csv(std::io::BufWriter::new(file), &entry.trace)?;
        }
        let mut json =
            serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        json.push('\n');
        fs::write(dir.join("manifest.json"), json)?;
        Ok(manifest)
    }

    pub fn read_from_dir(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join("manifest.json"))?;
        let manifest: Vec<ManifestEntry> = serde_json::from_str(&text)
            .map_err(|e| Error::schema("manifest.json", e.to_string()))?;
        let entries = manifest
            .into_iter()
            .map(|row| {
                let (_, replicate) = parse_label(&row.label)?;
                let file = fs::File::open(dir.join(&row.csv_path))?;
                let trace =
                    read_accel_csv(std::io::BufReader::new(file))?.with_label(row.label.clone());
                Ok(LibraryEntry {
                    grit: GritLevel::new(row.grit_p_grade, row.particle_um)?,
                    label: row.label,
                    replicate,
                    seed: row.seed,
                    trace,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }
}
