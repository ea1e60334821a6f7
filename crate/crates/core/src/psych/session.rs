use serde::{Deserialize, Serialize};

use super::{PresentationOrder, SessionPlan};
use crate::error::{Error, Result};
use crate::texture::GritLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Pending,
    Running,
    Complete,
}

/// Which of the two presented intervals the responder picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interval {
    First,
    Second,
}

impl std::str::FromStr for Interval {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Interval::First),
            "second" => Ok(Interval::Second),
            other => Err(Error::ProtocolViolation(format!(
                "unknown choice `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub j: usize,
    pub comparison_um: f64,
    pub order: PresentationOrder,
    pub replicate_ids: [usize; 2],
    /// 1 when the comparison was judged rougher.
    #[serde(rename = "Y")]
    pub y: u8,
    pub rt_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusRef {
    pub p_grade: String,
    pub particle_um: f64,
    pub replicate: usize,
    pub label: String,
}

impl StimulusRef {
    fn new(grit: &GritLevel, replicate: usize) -> Self {
        Self {
            p_grade: grit.p_grade.clone(),
            particle_um: grit.particle_um,
            replicate,
            label: format!("{}-r{replicate}", grit.p_grade),
        }
    }
}

/// What to play for the open trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusPair {
    pub trial_index: usize,
    pub total: usize,
    pub order: PresentationOrder,
    pub first: StimulusRef,
    pub second: StimulusRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub participant_id: String,
    pub plan: SessionPlan,
    pub(crate) trials: Vec<TrialRecord>,
    pub(crate) status: SessionStatus,
    pub started_unix_ms: Option<u64>,
    pub completed_unix_ms: Option<u64>,
}

impl SessionLog {
    pub fn new(plan: SessionPlan, participant_id: impl Into<String>) -> Self {
        Self {
            participant_id: participant_id.into(),
            plan,
            trials: Vec::new(),
            status: SessionStatus::Pending,
            started_unix_ms: None,
            completed_unix_ms: None,
        }
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    pub fn answered(&self) -> usize {
        self.trials.len()
    }

    pub fn remaining(&self) -> usize {
        self.plan.total() - self.trials.len()
    }

    pub fn start(&mut self) -> Result<()> {
        match self.status {
            SessionStatus::Complete => Err(Error::SessionComplete),
            _ => {
                self.status = SessionStatus::Running;
                Ok(())
            }
        }
    }

    pub fn next_trial(&self) -> Result<StimulusPair> {
        match self.status {
            SessionStatus::Complete => return Err(Error::SessionComplete),
            SessionStatus::Pending => {
                return Err(Error::ProtocolViolation("session has not started".into()))
            }
            SessionStatus::Running => {}
        }
        let j = self.trials.len();
        let t = &self.plan.trials[j];
        let comparison = self
            .plan
            .comparison(t.comparison_um)
            .expect("planned levels come from the comparison list");
        let r = StimulusRef::new(&self.plan.reference, t.replicate_ids[0]);
        let c = StimulusRef::new(comparison, t.replicate_ids[1]);
        let (first, second) = match t.order {
            PresentationOrder::ReferenceFirst => (r, c),
            PresentationOrder::ComparisonFirst => (c, r),
        };
        Ok(StimulusPair {
            trial_index: j,
            total: self.plan.total(),
            order: t.order,
            first,
            second,
        })
    }

    /// Appends the answer to the open trial; `Y = 1` iff the chosen interval
    /// carried the comparison.
    pub fn record_response(
        &mut self,
        trial_index: usize,
        choice: Interval,
        rt_ms: Option<f64>,
    ) -> Result<&TrialRecord> {
        let open = self.trials.len();
        if trial_index < open {
            return Err(Error::ProtocolViolation(format!(
                "trial {trial_index} is already answered"
            )));
        }
        if self.status == SessionStatus::Complete {
            return Err(Error::SessionComplete);
        }
        if self.status == SessionStatus::Pending {
            return Err(Error::ProtocolViolation("session has not started".into()));
        }
        if trial_index != open {
            return Err(Error::ProtocolViolation(format!(
                "trial {trial_index} answered while trial {open} is open"
            )));
        }
        if let Some(rt) = rt_ms {
            if !rt.is_finite() || rt < 0.0 {
                return Err(Error::ProtocolViolation(
                    "response time must be finite and >= 0".into(),
                ));
            }
        }
        let t = &self.plan.trials[open];
        let carried = match t.order {
            PresentationOrder::ComparisonFirst => Interval::First,
            PresentationOrder::ReferenceFirst => Interval::Second,
        };
        self.trials.push(TrialRecord {
            j: open,
            comparison_um: t.comparison_um,
            order: t.order,
            replicate_ids: t.replicate_ids,
            y: u8::from(choice == carried),
            rt_ms,
        });
        if self.trials.len() == self.plan.total() {
            self.status = SessionStatus::Complete;
        }
        Ok(self.trials.last().expect("just pushed"))
    }

    /// `(comparison_um, rougher)` pairs for the psychometric fit.
    pub fn fit_trials(&self) -> Vec<(f64, bool)> {
        self.trials
            .iter()
            .map(|t| (t.comparison_um, t.y == 1))
            .collect()
    }

    /// Per-level `(x, n, proportion)` over answered trials, ascending in x.
    pub fn level_proportions(&self) -> Vec<(f64, usize, f64)> {
        crate::stats::group_trials(&self.fit_trials())
            .into_iter()
            .map(|l| (l.x, l.n, l.k as f64 / l.n as f64))
            .collect()
    }
}
