//! Session log files: JSON Lines, one header record followed by one record
//! per turn.
//!
//! ```text
//! {"record":"header","schema_version":1,"session_id":"...","scenario_id":"scenario-a",...}
//! {"record":"turn","index":1,"player_input":"I take the key",...}
//! ```
//!
//! Each turn embeds the world after the turn, so a log can be replayed and
//! checked without a backend.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ApplicationReport, Engine, EngineOptions};
use crate::locale::Locale;
use crate::scenario::WorldDocument;
use crate::session::{objective_satisfied, TurnRecord};
use crate::world::World;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema_version: u32,
    pub session_id: String,
    pub scenario_id: String,
    pub locale: Locale,
    /// Backend label, e.g. `gemini:gemini-1.5-flash` or `scripted`.
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tester: Option<String>,
    #[serde(default)]
    pub engine: EngineOptions,
    pub initial_world: WorldDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum LogLine {
    Header(LogHeader),
    Turn(TurnRecord),
}

/// A loaded session log: header plus turns in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub header: LogHeader,
    pub turns: Vec<TurnRecord>,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("malformed log (line {line}): {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> LogError {
    LogError::Malformed {
        line,
        message: message.into(),
    }
}

/// Outcome of re-deriving one turn from the previous snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayStep {
    pub index: u32,
    pub reports_match: bool,
    pub world_match: bool,
    pub objective_match: bool,
    pub reports: Vec<ApplicationReport>,
}

impl ReplayStep {
    pub fn is_consistent(&self) -> bool {
        self.reports_match && self.world_match && self.objective_match
    }
}

impl SessionLog {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = LogLine::Header(self.header.clone());
        out.push_str(&serde_json::to_string(&header).expect("log header serializes"));
        out.push('\n');
        for t in &self.turns {
            let line = LogLine::Turn(t.clone());
            out.push_str(&serde_json::to_string(&line).expect("turn record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, LogError> {
        let mut header: Option<LogHeader> = None;
        let mut turns: Vec<TurnRecord> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let line: LogLine =
                serde_json::from_str(raw).map_err(|e| malformed(n, e.to_string()))?;
            match line {
                LogLine::Header(h) => {
                    if header.is_some() || !turns.is_empty() {
                        return Err(malformed(n, "header must be the first record"));
                    }
                    if h.schema_version != SCHEMA_VERSION {
                        return Err(malformed(
                            n,
                            format!("unsupported schema version {}", h.schema_version),
                        ));
                    }
                    h.initial_world
                        .to_world()
                        .map_err(|v| malformed(n, format!("initial world: {}", v[0])))?;
                    header = Some(h);
                }
                LogLine::Turn(t) => {
                    if header.is_none() {
                        return Err(malformed(n, "turn record before header"));
                    }
                    let expected = turns.len() as u32 + 1;
                    if t.index != expected {
                        return Err(malformed(
                            n,
                            format!("expected turn {expected}, found {}", t.index),
                        ));
                    }
                    if t.parse_error.is_none() && t.reports.len() != t.parsed.to_plan().len() {
                        return Err(malformed(n, "report count differs from parsed plan size"));
                    }
                    if let Some(bad) = t.annotations.iter().find(|a| a.turn != t.index) {
                        return Err(malformed(
                            n,
                            format!("annotation for turn {} stored on turn {}", bad.turn, t.index),
                        ));
                    }
                    t.world_after
                        .to_world()
                        .map_err(|v| malformed(n, format!("world snapshot: {}", v[0])))?;
                    turns.push(t);
                }
            }
        }
        let header = header.ok_or_else(|| malformed(1, "missing header record"))?;
        Ok(SessionLog { header, turns })
    }

    pub fn initial_world(&self) -> World {
        self.header
            .initial_world
            .to_world()
            .expect("validated when the log was loaded")
    }

    /// World state after turn `index` (0 is the starting state).
    pub fn world_at(&self, index: u32) -> Option<World> {
        if index == 0 {
            return Some(self.initial_world());
        }
        let turn = self.turns.get(index as usize - 1)?;
        Some(turn.world_after.to_world().expect("validated when the log was loaded"))
    }

    /// Re-executes every turn's parsed plan on the previous snapshot and
    /// compares the result with what the log recorded.
    pub fn replay(&self) -> Vec<ReplayStep> {
        let engine = Engine::new(self.header.engine);
        let mut world = self.initial_world();
        let mut steps = Vec::with_capacity(self.turns.len());
        for t in &self.turns {
            let reports = engine.execute(&mut world, &t.parsed.to_plan(), &t.player_input);
            let stored = t.world_after.to_world().expect("validated when the log was loaded");
            steps.push(ReplayStep {
                index: t.index,
                reports_match: reports == t.reports,
                world_match: world == stored,
                objective_match: objective_satisfied(&world) == t.objective_met,
                reports,
            });
            world = stored;
        }
        steps
    }

    /// Row label for error tables, e.g. `TesterA (gemini)`.
    pub fn row_label(&self) -> String {
        match &self.header.tester {
            Some(t) => format!("{t} ({})", self.header.backend),
            None => format!("{} ({})", self.header.session_id, self.header.backend),
        }
    }
}
