//! Canonical JSON form of a [`SessionLog`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_session_plan_with, SessionLog, SessionStatus, TrialRecord};
use crate::error::{Error, Result};
use crate::texture::GritLevel;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanJson {
    reference_um: f64,
    comparisons_um: Vec<f64>,
    reps: usize,
    seed: u64,
    #[serde(default = "default_replicates")]
    replicates: usize,
}

fn default_replicates() -> usize {
    super::DEFAULT_REPLICATES
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogJson {
    participant_id: String,
    condition_label: String,
    plan: PlanJson,
    trials: Vec<TrialRecord>,
    status: SessionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    started_unix_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    completed_unix_ms: Option<u64>,
}

/// Pretty JSON with fixed key order and a trailing LF.
pub fn session_to_json(log: &SessionLog) -> String {
    let dto = LogJson {
        participant_id: log.participant_id.clone(),
        condition_label: log.plan.condition_label.clone(),
        plan: PlanJson {
            reference_um: log.plan.reference.particle_um,
            comparisons_um: log.plan.comparisons.iter().map(|g| g.particle_um).collect(),
            reps: log.plan.reps_per_level,
            seed: log.plan.seed,
            replicates: log.plan.replicates,
        },
        trials: log.trials.clone(),
        status: log.status,
        started_unix_ms: log.started_unix_ms,
        completed_unix_ms: log.completed_unix_ms,
    };
    let mut s = serde_json::to_string_pretty(&dto).expect("log serialises");
    s.push('\n');
    s
}

fn grit(um: f64, field: &str) -> Result<GritLevel> {
    GritLevel::by_particle(um)
        .or_else(|_| GritLevel::new(format!("{um}um"), um))
        .map_err(|e| Error::schema(field, e.to_string()))
}

/// Parses and revalidates every invariant; the plan is regenerated from its
/// seed and each trial must match it.
pub fn session_from_json(text: &str) -> Result<SessionLog> {
    let dto: LogJson = serde_json::from_str(text).map_err(|e| {
        Error::schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let reference = grit(dto.plan.reference_um, "plan.reference_um")?;
    let comparisons = dto
        .plan
        .comparisons_um
        .iter()
        .enumerate()
        .map(|(i, &um)| grit(um, &format!("plan.comparisons_um[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let plan = build_session_plan_with(
        reference,
        comparisons,
        dto.plan.reps,
        dto.plan.replicates,
        dto.plan.seed,
    )
    .map_err(|e| Error::schema("plan", e.to_string()))?
    .with_condition(dto.condition_label);

    let total = plan.total();
    if dto.trials.len() > total {
        return Err(Error::schema(
            "trials",
            format!("{} trials exceed plan total {total}", dto.trials.len()),
        ));
    }
    for (j, (t, p)) in dto.trials.iter().zip(&plan.trials).enumerate() {
        let field = |name: &str| format!("trials[{j}].{name}");
        if t.j != j {
            return Err(Error::schema(
                field("j"),
                format!("expected {j}, found {}", t.j),
            ));
        }
        if t.y > 1 {
            return Err(Error::schema(
                field("Y"),
                format!("must be 0 or 1, found {}", t.y),
            ));
        }
        if t.comparison_um != p.comparison_um {
            return Err(Error::schema(
                field("comparison_um"),
                "does not match the plan",
            ));
        }
        if t.order != p.order {
            return Err(Error::schema(field("order"), "does not match the plan"));
        }
        if t.replicate_ids != p.replicate_ids {
            return Err(Error::schema(
                field("replicate_ids"),
                "does not match the plan",
            ));
        }
        if t.rt_ms.is_some_and(|rt| !rt.is_finite() || rt < 0.0) {
            return Err(Error::schema(field("rt_ms"), "must be finite and >= 0"));
        }
    }
    let n = dto.trials.len();
    let consistent = match dto.status {
        SessionStatus::Complete => n == total,
        SessionStatus::Running => n < total,
        SessionStatus::Pending => n == 0,
    };
    if !consistent {
        return Err(Error::schema(
            "status",
            format!(
                "{:?} is inconsistent with {n} of {total} trials answered",
                dto.status
            ),
        ));
    }
    Ok(SessionLog {
        participant_id: dto.participant_id,
        plan,
        trials: dto.trials,
        status: dto.status,
        started_unix_ms: dto.started_unix_ms,
        completed_unix_ms: dto.completed_unix_ms,
    })
}

pub fn export_session(log: &SessionLog, path: &Path) -> Result<()> {
    std::fs::write(path, session_to_json(log))?;
    Ok(())
}

pub fn import_session(path: &Path) -> Result<SessionLog> {
    session_from_json(&std::fs::read_to_string(path)?)
}
