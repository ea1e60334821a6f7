//! Absolute identification of a texture out of the library's grits.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{perceived_intensity, ObserverKind, ObserverModel, StimulusLibrary};
use crate::error::{Error, Result};
use crate::rng;
use crate::stats::ConfusionMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Identifier {
    /// Answers uniformly at random; the chance baseline.
    Uniform,
    /// Perturbs the presented trace's intensity and answers with the grit
    /// whose mean intensity is nearest on a log scale.
    SignalChain(ObserverModel),
}

/// Pools `participants × trials_per_grit` presentations of every grit.
pub fn simulate_identification(
    library: &StimulusLibrary,
    identifier: &Identifier,
    participants: usize,
    trials_per_grit: usize,
    seed: u64,
) -> Result<ConfusionMatrix> {
    let mut grits: Vec<(String, f64)> = Vec::new();
    for e in &library.entries {
        if !grits.iter().any(|(g, _)| *g == e.grit.p_grade) {
            grits.push((e.grit.p_grade.clone(), e.grit.particle_um));
        }
    }
    if grits.is_empty() {
        return Err(Error::EmptyInput("stimulus library is empty"));
    }
    if participants == 0 || trials_per_grit == 0 {
        return Err(Error::invalid(
            "participants and trials per grit must be at least 1",
        ));
    }

    // intensities[class][replicate]
    let intensities: Vec<Vec<f64>> = match identifier {
        Identifier::Uniform => Vec::new(),
        Identifier::SignalChain(obs) => {
            obs.validate()?;
            grits
                .iter()
                .map(|(g, _)| {
                    library
                        .entries
                        .iter()
                        .filter(|e| e.grit.p_grade == *g)
                        .map(|e| perceived_intensity(&e.trace, obs))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        }
    };
    let templates: Vec<f64> = intensities
        .iter()
        .map(|v| (v.iter().sum::<f64>() / v.len() as f64).ln())
        .collect();

    let k = grits.len();
    let mut matrix = ConfusionMatrix::new(grits.iter().map(|(g, _)| g.clone()).collect());
    for p in 0..participants {
        let mut r = rng::child(seed, p as u64);
        for _ in 0..trials_per_grit {
            for (class, _) in grits.iter().enumerate() {
                let answer = match identifier {
                    Identifier::Uniform => r.random_range(0..k),
                    Identifier::SignalChain(obs) => {
                        let ObserverKind::SignalChain { sigma, .. } = obs.kind else {
                            unreachable!("validated by perceived_intensity")
                        };
                        let reps = &intensities[class];
                        let base = reps[r.random_range(0..reps.len())];
                        let z: f64 = StandardNormal.sample(&mut r);
                        let felt = (base * (1.0 + sigma * z)).max(f64::MIN_POSITIVE).ln();
                        nearest(&templates, felt)
                    }
                };
                matrix.record(class, answer);
            }
        }
    }
    Ok(matrix)
}

fn nearest(templates: &[f64], x: f64) -> usize {
    templates
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}
