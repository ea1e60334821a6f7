use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::texture::GritLevel;

/// Saved stimuli per grit a plan draws from unless told otherwise.
pub const DEFAULT_REPLICATES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresentationOrder {
    ReferenceFirst,
    ComparisonFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedTrial {
    pub comparison_um: f64,
    pub order: PresentationOrder,
    /// `[reference, comparison]` replicate indices.
    pub replicate_ids: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionPlan {
    pub reference: GritLevel,
    pub comparisons: Vec<GritLevel>,
    pub reps_per_level: usize,
    pub replicates: usize,
    pub seed: u64,
    pub condition_label: String,
    pub trials: Vec<PlannedTrial>,
}

impl SessionPlan {
    pub fn total(&self) -> usize {
        self.trials.len()
    }

    pub fn comparison(&self, um: f64) -> Option<&GritLevel> {
        self.comparisons.iter().find(|g| g.particle_um == um)
    }

    pub fn with_condition(mut self, label: impl Into<String>) -> Self {
        self.condition_label = label.into();
        self
    }
}

pub fn build_session_plan(
    reference: GritLevel,
    comparisons: Vec<GritLevel>,
    reps: usize,
    seed: u64,
) -> Result<SessionPlan> {
    build_session_plan_with(reference, comparisons, reps, DEFAULT_REPLICATES, seed)
}

/// Shuffles the reps-replicated level list, then draws order and replicate
/// ids per trial from the same stream.
pub fn build_session_plan_with(
    reference: GritLevel,
    comparisons: Vec<GritLevel>,
    reps: usize,
    replicates: usize,
    seed: u64,
) -> Result<SessionPlan> {
    if comparisons.is_empty() {
        return Err(Error::invalid("comparison list is empty"));
    }
    if reps == 0 {
        return Err(Error::invalid("reps per level must be at least 1"));
    }
    if replicates == 0 {
        return Err(Error::invalid("replicates per grit must be at least 1"));
    }
    for (i, c) in comparisons.iter().enumerate() {
        if comparisons[..i]
            .iter()
            .any(|d| d.particle_um == c.particle_um)
        {
            return Err(Error::invalid(format!(
                "comparison level {} µm listed twice",
                c.particle_um
            )));
        }
    }
    let mut levels: Vec<f64> = comparisons
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.particle_um, reps))
        .collect();
    let mut r = rng::stream(seed);
    levels.shuffle(&mut r);
    let trials = levels
        .into_iter()
        .map(|comparison_um| PlannedTrial {
            comparison_um,
            order: if r.random::<bool>() {
                PresentationOrder::ComparisonFirst
            } else {
                PresentationOrder::ReferenceFirst
            },
            replicate_ids: [r.random_range(0..replicates), r.random_range(0..replicates)],
        })
        .collect();
    Ok(SessionPlan {
        reference,
        comparisons,
        reps_per_level: reps,
        replicates,
        seed,
        condition_label: String::new(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::texture::canonical_grits;

    fn plan(seed: u64) -> SessionPlan {
        build_session_plan(GritLevel::reference(), canonical_grits(), 20, seed).unwrap()
    }

    #[test]
    fn hundred_trials_twenty_per_level() {
        let p = plan(1);
        assert_eq!(p.total(), 100);
        for g in canonical_grits() {
            assert_eq!(
                p.trials
                    .iter()
                    .filter(|t| t.comparison_um == g.particle_um)
                    .count(),
                20
            );
        }
        assert!(p
            .trials
            .iter()
            .all(|t| t.replicate_ids.iter().all(|&r| r < 2)));
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(plan(7), plan(7));
        assert_ne!(plan(7).trials, plan(8).trials);
    }

    #[test]
    fn order_cells_tabulated_over_seeds() {
        let mut both_seen = 0;
        for seed in 0..50 {
            let p = plan(seed);
            for g in canonical_grits() {
                let first = p
                    .trials
                    .iter()
                    .filter(|t| {
                        t.comparison_um == g.particle_um
                            && t.order == PresentationOrder::ComparisonFirst
                    })
                    .count();
                let second = 20 - first;
                assert!(first.abs_diff(second) <= 20);
                if first > 0 && second > 0 {
                    both_seen += 1;
                }
            }
        }
        assert!(both_seen > 200);
    }

    #[test]
    fn invalid_plans() {
        let r = GritLevel::reference();
        assert!(build_session_plan(r.clone(), vec![], 20, 0).is_err());
        assert!(build_session_plan(r.clone(), canonical_grits(), 0, 0).is_err());
        let mut dup = canonical_grits();
        dup.push(dup[0].clone());
        assert!(matches!(
            build_session_plan(r, dup, 20, 0),
            Err(Error::InvalidSpec(_))
        ));
    }
}
