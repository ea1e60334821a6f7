//! Questionnaire scoring: NASA RTLX, SUS and Likert tables.

use serde::{Deserialize, Serialize};

use super::studentized::{tukey_hsd_ci, TukeyHsd};
use crate::error::{Error, Result};

/// Unweighted NASA task-load index from six 0–20 ratings, on a 0–100 scale.
pub fn nasa_rtlx_index(scores: &[f64]) -> Result<f64> {
    if scores.len() != 6 {
        return Err(Error::invalid(format!(
            "RTLX needs 6 ratings, got {}",
            scores.len()
        )));
    }
    if let Some(s) = scores.iter().find(|s| !(0.0..=20.0).contains(*s)) {
        return Err(Error::invalid(format!("RTLX rating {s} outside [0, 20]")));
    }
    Ok(scores.iter().map(|s| s * 5.0).sum::<f64>() / 6.0)
}

/// System Usability Scale from ten 1–5 items.
pub fn sus_score(items: &[u8]) -> Result<f64> {
    if items.len() != 10 {
        return Err(Error::invalid(format!(
            "SUS needs 10 items, got {}",
            items.len()
        )));
    }
    if let Some(x) = items.iter().find(|x| !(1..=5).contains(*x)) {
        return Err(Error::invalid(format!("SUS item {x} outside [1, 5]")));
    }
    let sum: u32 = items
        .iter()
        .enumerate()
        .map(|(i, &x)| u32::from(if i % 2 == 0 { x - 1 } else { 5 - x }))
        .sum();
    Ok(f64::from(sum) * 2.5)
}

/// Likert responses indexed `[participant][condition][statement][repeat]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertTable {
    pub conditions: Vec<String>,
    pub statements: Vec<String>,
    pub responses: Vec<Vec<Vec<Vec<f64>>>>,
}

impl LikertTable {
    fn validate(&self) -> Result<()> {
        if self.responses.is_empty() {
            return Err(Error::EmptyInput("no participants"));
        }
        let (c, s) = (self.conditions.len(), self.statements.len());
        let well_formed = self.responses.iter().all(|p| {
            p.len() == c
                && p.iter()
                    .all(|cond| cond.len() == s && cond.iter().all(|r| !r.is_empty()))
        });
        if !well_formed || c == 0 || s == 0 {
            return Err(Error::invalid(
                "Likert table is not participant × condition × statement",
            ));
        }
        Ok(())
    }

    /// Per-participant score of each cell: the mean over repeats.
    pub fn participant_cells(&self) -> Result<Vec<Vec<Vec<f64>>>> {
        self.validate()?;
        Ok(self
            .responses
            .iter()
            .map(|p| {
                p.iter()
                    .map(|cond| {
                        cond.iter()
                            .map(|r| r.iter().sum::<f64>() / r.len() as f64)
                            .collect()
                    })
                    .collect()
            })
            .collect())
    }

    /// Cell means over participants, `[condition][statement]`.
    pub fn cell_means(&self) -> Result<Vec<Vec<f64>>> {
        let cells = self.participant_cells()?;
        let n = cells.len() as f64;
        let (c, s) = (self.conditions.len(), self.statements.len());
        Ok((0..c)
            .map(|ci| {
                (0..s)
                    .map(|si| cells.iter().map(|p| p[ci][si]).sum::<f64>() / n)
                    .collect()
            })
            .collect())
    }

    /// Tukey HSD with the within-cell error pooled over every condition and
    /// statement.
    pub fn tukey(&self, alpha: f64) -> Result<TukeyHsd> {
        let cells = self.participant_cells()?;
        let means = self.cell_means()?;
        let n = cells.len();
        let groups = self.conditions.len() * self.statements.len();
        let dof = (n * groups) as f64 - groups as f64;
        if dof < 1.0 {
            return Err(Error::invalid(
                "pooled error needs at least two participants",
            ));
        }
        let ss: f64 = cells
            .iter()
            .flat_map(|p| {
                p.iter().enumerate().flat_map(|(ci, cond)| {
                    let means = &means;
                    cond.iter()
                        .enumerate()
                        .map(move |(si, v)| (v - means[ci][si]).powi(2))
                })
            })
            .sum();
        tukey_hsd_ci(&means, ss / dof, dof, n, alpha)
    }
}
