//! Method-of-constant-stimuli 2AFC sessions.

mod log_json;
mod plan;
mod session;
mod simulate;

pub use log_json::{export_session, import_session, session_from_json, session_to_json};
pub use plan::{
    build_session_plan, build_session_plan_with, PlannedTrial, PresentationOrder, SessionPlan,
    DEFAULT_REPLICATES,
};
pub use session::{Interval, SessionLog, SessionStatus, StimulusPair, StimulusRef, TrialRecord};
pub use simulate::run_simulated_session;
