use std::collections::HashMap;

use super::{Interval, PresentationOrder, SessionLog, SessionPlan};
use crate::error::{Error, Result};
use crate::rng;
use crate::texture::{
    analytic_observer_respond, perceived_intensity, signal_chain_respond_intensity, Choice,
    ObserverKind, ObserverModel, StimulusLibrary,
};

/// Drives a fresh log to completion with a simulated observer. Trial `j`
/// draws from its own stream, so the log depends only on the two seeds.
pub fn run_simulated_session(
    plan: &SessionPlan,
    observer: &ObserverModel,
    library: Option<&StimulusLibrary>,
) -> Result<SessionLog> {
    observer.validate()?;
    let intensities = match observer.kind {
        ObserverKind::Analytic { .. } => HashMap::new(),
        ObserverKind::SignalChain { .. } => {
            let lib = library
                .ok_or_else(|| Error::invalid("signal-chain observer needs a stimulus library"))?;
            chain_intensities(plan, observer, lib)?
        }
    };

    let mut log = SessionLog::new(plan.clone(), format!("sim-{}", observer.seed));
    log.start()?;
    let reference_um = plan.reference.particle_um;
    for (j, t) in plan.trials.iter().enumerate() {
        let mut r = rng::child(observer.seed, j as u64);
        let choice = match observer.kind {
            ObserverKind::Analytic { .. } => {
                analytic_observer_respond(reference_um, t.comparison_um, observer, &mut r)?
            }
            ObserverKind::SignalChain { sigma, .. } => {
                let i_ref = intensities[&key(reference_um, t.replicate_ids[0])];
                let i_comp = intensities[&key(t.comparison_um, t.replicate_ids[1])];
                signal_chain_respond_intensity(i_ref, i_comp, sigma, &mut r)
            }
        };
        let comparison_first = t.order == PresentationOrder::ComparisonFirst;
        let interval = match (choice, comparison_first) {
            (Choice::Comparison, true) | (Choice::Reference, false) => Interval::First,
            _ => Interval::Second,
        };
        log.record_response(j, interval, None)?;
    }
    Ok(log)
}

fn key(um: f64, replicate: usize) -> (u64, usize) {
    (um.to_bits(), replicate)
}

fn chain_intensities(
    plan: &SessionPlan,
    observer: &ObserverModel,
    lib: &StimulusLibrary,
) -> Result<HashMap<(u64, usize), f64>> {
    let mut out = HashMap::new();
    let wanted = plan.trials.iter().flat_map(|t| {
        [
            (plan.reference.particle_um, t.replicate_ids[0]),
            (t.comparison_um, t.replicate_ids[1]),
        ]
    });
    for (um, rep) in wanted {
        if out.contains_key(&key(um, rep)) {
            continue;
        }
        let entry = lib
            .get(um, rep)
            .ok_or_else(|| Error::invalid(format!("library has no replicate {rep} for {um} µm")))?;
        out.insert(key(um, rep), perceived_intensity(&entry.trace, observer)?);
    }
    Ok(out)
}
