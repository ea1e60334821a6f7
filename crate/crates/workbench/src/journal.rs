//! Append-only JSONL journal, one file per session.
//!
//! Each accepted mutation is written as one newline-terminated line and
//! synced before the caller acknowledges it. Replay stops at the last
//! complete line, so a write torn by a crash is dropped.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vibes_core::psych::{
    build_session_plan_with, Interval, SessionLog, SessionPlan, SessionStatus, DEFAULT_REPLICATES,
};
use vibes_core::texture::GritLevel;

use crate::error::{Result, WorkbenchError};

/// The plan object of the session-log schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub reference_um: f64,
    pub comparisons_um: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

fn grit(um: f64) -> vibes_core::Result<GritLevel> {
    GritLevel::by_particle(um).or_else(|_| GritLevel::new(format!("{um}um"), um))
}

impl PlanSpec {
    pub fn build(&self, condition_label: &str) -> vibes_core::Result<SessionPlan> {
        let comparisons = self
            .comparisons_um
            .iter()
            .map(|&um| grit(um))
            .collect::<vibes_core::Result<_>>()?;
        Ok(build_session_plan_with(
            grit(self.reference_um)?,
            comparisons,
            self.reps,
            self.replicates,
            self.seed,
        )?
        .with_condition(condition_label))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum JournalEntry {
    Create {
        participant_id: String,
        condition_label: String,
        plan: PlanSpec,
        started_unix_ms: Option<u64>,
    },
    Response {
        trial_index: usize,
        choice: Interval,
        rt_ms: Option<f64>,
        at_unix_ms: Option<u64>,
    },
}

impl JournalEntry {
    /// Applies the entry to `log`; `Create` must come first and only once.
    pub fn apply(&self, log: &mut Option<SessionLog>) -> vibes_core::Result<()> {
        match (self, log.as_mut()) {
            (
                JournalEntry::Create {
                    participant_id,
                    condition_label,
                    plan,
                    started_unix_ms,
                },
                None,
            ) => {
                let mut l = SessionLog::new(plan.build(condition_label)?, participant_id.clone());
                l.started_unix_ms = *started_unix_ms;
                l.start()?;
                *log = Some(l);
                Ok(())
            }
            (
                JournalEntry::Response {
                    trial_index,
                    choice,
                    rt_ms,
                    at_unix_ms,
                },
                Some(l),
            ) => {
                l.record_response(*trial_index, *choice, *rt_ms)?;
                if l.status() == SessionStatus::Complete {
                    l.completed_unix_ms = *at_unix_ms;
                }
                Ok(())
            }
            (JournalEntry::Create { .. }, Some(_)) => Err(vibes_core::Error::ProtocolViolation(
                "journal creates the session twice".into(),
            )),
            (JournalEntry::Response { .. }, None) => Err(vibes_core::Error::ProtocolViolation(
                "journal response before create".into(),
            )),
        }
    }
}

#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    pub fn path_for(dir: &Path, id: &str) -> PathBuf {
        dir.join(format!("{id}.jsonl"))
    }

    /// Starts a new journal; fails if one already exists for `id`.
    pub fn create(dir: &Path, id: &str, first: &JournalEntry) -> Result<Self> {
        let path = Self::path_for(dir, id);
        let file = OpenOptions::new()
            .append(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| WorkbenchError::io(&path, e))?;
        let mut j = Self { path, file };
        j.append(first)?;
        Ok(j)
    }

    pub fn append(&mut self, entry: &JournalEntry) -> Result<()> {
        let mut line = serde_json::to_string(entry).expect("journal entries serialise");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|e| WorkbenchError::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Rebuilds the log and reopens the journal for appending, cutting off
    /// any torn trailing line first.
    pub fn open(path: &Path) -> Result<(SessionLog, Self)> {
        let (log, good_len) = replay(path)?;
        let file = OpenOptions::new()
            .write(true)
            .open(path)
            .map_err(|e| WorkbenchError::io(path, e))?;
        file.set_len(good_len)
            .map_err(|e| WorkbenchError::io(path, e))?;
        drop(file);
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| WorkbenchError::io(path, e))?;
        Ok((
            log,
            Self {
                path: path.to_path_buf(),
                file,
            },
        ))
    }
}

/// Replays every complete line; returns the log and the byte length of the
/// complete prefix.
pub fn replay(path: &Path) -> Result<(SessionLog, u64)> {
    let bytes = std::fs::read(path).map_err(|e| WorkbenchError::io(path, e))?;
    let bad = |message: String| WorkbenchError::Journal {
        path: path.display().to_string(),
        message,
    };
    let mut log = None;
    let mut good = 0usize;
    for (n, line) in bytes.split_inclusive(|&b| b == b'\n').enumerate() {
        if line.last() != Some(&b'\n') {
            break;
        }
        let entry: JournalEntry =
            serde_json::from_slice(line).map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
        entry
            .apply(&mut log)
            .map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
        good += line.len();
    }
    let log = log.ok_or_else(|| bad("no complete create entry".into()))?;
    Ok((log, good as u64))
}
