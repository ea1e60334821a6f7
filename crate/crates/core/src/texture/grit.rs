use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// FEPA P-grade and mean particle size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GritLevel {
    pub p_grade: String,
    pub particle_um: f64,
}

const CANONICAL: [(&str, f64); 5] = [
    ("P1000", 18.0),
    ("P220", 65.0),
    ("P120", 127.0),
    ("P80", 195.0),
    ("P60", 264.0),
];

/// P120, midway between the smoothest and roughest stimuli.
pub const REFERENCE_GRIT: &str = "P120";

impl GritLevel {
    pub fn new(p_grade: impl Into<String>, particle_um: f64) -> Result<Self> {
        if !(particle_um > 0.0) || !particle_um.is_finite() {
            return Err(Error::invalid(format!(
                "particle size {particle_um} µm must be positive"
            )));
        }
        Ok(Self {
            p_grade: p_grade.into(),
            particle_um,
        })
    }

    /// Looks up one of the five canonical grades, e.g. `"P60"`.
    pub fn canonical(p_grade: &str) -> Result<Self> {
        CANONICAL
            .iter()
            .find(|(g, _)| g.eq_ignore_ascii_case(p_grade.trim()))
            .map(|&(g, um)| Self {
                p_grade: g.to_string(),
                particle_um: um,
            })
            .ok_or_else(|| Error::invalid(format!("unknown grit `{p_grade}`")))
    }

    pub fn by_particle(particle_um: f64) -> Result<Self> {
        CANONICAL
            .iter()
            .find(|(_, um)| *um == particle_um)
            .map(|&(g, um)| Self {
                p_grade: g.to_string(),
                particle_um: um,
            })
            .map_or_else(|| Self::new(format!("{particle_um}um"), particle_um), Ok)
    }

    pub fn reference() -> Self {
        Self::canonical(REFERENCE_GRIT).expect("reference grit is canonical")
    }
}

/// The five stimuli from smoothest to roughest.
pub fn canonical_grits() -> Vec<GritLevel> {
    CANONICAL
        .iter()
        .map(|&(g, um)| GritLevel {
            p_grade: g.to_string(),
            particle_um: um,
        })
        .collect()
}
