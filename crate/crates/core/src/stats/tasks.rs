//! Task metrics for the slippage and fragile-object experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Grasp,
    /// Hand starts to open (experimenter command).
    Open,
    /// Hand starts to close again (subject command).
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskEvent {
    pub kind: EventKind,
    pub t_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipMetrics {
    pub x_start: f64,
    pub x_finish: Option<f64>,
    pub slip: f64,
    pub fell: bool,
    pub reaction_time_s: Option<f64>,
}

/// `slip = x_start − x_finish`. When the object fell, only the starting
/// grasp point is used, measured from the origin of the graduated scale.
pub fn slip_and_reaction(
    events: &[TaskEvent],
    x_start: f64,
    x_finish: Option<f64>,
    fell: bool,
) -> Result<SlipMetrics> {
    if !x_start.is_finite() {
        return Err(Error::invalid("x_start must be finite"));
    }
    let open = events.iter().find(|e| e.kind == EventKind::Open);
    let close = open.and_then(|o| {
        events
            .iter()
            .find(|e| e.kind == EventKind::Close && e.t_s >= o.t_s)
    });
    let reaction_time_s = match (open, close) {
        (Some(o), Some(c)) => Some(c.t_s - o.t_s),
        (None, _) if !fell => return Err(Error::invalid("missing open event")),
        (_, None) if !fell => return Err(Error::invalid("missing close event")),
        _ => None,
    };
    let slip = if fell {
        x_start
    } else {
        let finish = x_finish
            .ok_or_else(|| Error::invalid("x_finish is required unless the object fell"))?;
        x_start - finish
    };
    Ok(SlipMetrics {
        x_start,
        x_finish: if fell { None } else { x_finish },
        slip,
        fell,
        reaction_time_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipSummary {
    pub mean_reaction_time_s: Option<f64>,
    pub mean_slip: f64,
    pub fallen: usize,
    pub trials: usize,
}

pub fn summarize_slips(trials: &[SlipMetrics]) -> Result<SlipSummary> {
    if trials.is_empty() {
        return Err(Error::EmptyInput("no slippage trials"));
    }
    let rts: Vec<f64> = trials.iter().filter_map(|t| t.reaction_time_s).collect();
    Ok(SlipSummary {
        mean_reaction_time_s: (!rts.is_empty()).then(|| rts.iter().sum::<f64>() / rts.len() as f64),
        mean_slip: trials.iter().map(|t| t.slip).sum::<f64>() / trials.len() as f64,
        fallen: trials.iter().filter(|t| t.fell).count(),
        trials: trials.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FragileTrial {
    /// From first contact to release of the box.
    pub duration_s: f64,
    pub broken: bool,
    pub regrips: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FragileSummary {
    pub mean_duration_s: f64,
    pub total_broken: usize,
    pub mean_regrips: f64,
    pub trials: usize,
}

pub fn summarize_fragile(trials: &[FragileTrial]) -> Result<FragileSummary> {
    if trials.is_empty() {
        return Err(Error::EmptyInput("no fragile-object trials"));
    }
    let n = trials.len() as f64;
    Ok(FragileSummary {
        mean_duration_s: trials.iter().map(|t| t.duration_s).sum::<f64>() / n,
        total_broken: trials.iter().filter(|t| t.broken).count(),
        mean_regrips: trials.iter().map(|t| f64::from(t.regrips)).sum::<f64>() / n,
        trials: trials.len(),
    })
}
