//! Manual error annotations on session logs and the per-tester error tables
//! aggregated from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::locale::Locale;
use crate::log::SessionLog;

/// The closed set of error categories: three for wrong LLM suggestions, two
/// for world-modeling limitations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCategory {
    #[serde(rename = "LLM-MI")]
    LlmMoveItem,
    #[serde(rename = "LLM-PM")]
    LlmMovePlayer,
    #[serde(rename = "LLM-UL")]
    LlmUnblock,
    #[serde(rename = "WM-Planning")]
    Planning,
    #[serde(rename = "WM-Memory")]
    Memory,
}

impl ErrorCategory {
    /// Column order of the error tables.
    pub const ALL: [ErrorCategory; 5] = [
        ErrorCategory::LlmMoveItem,
        ErrorCategory::LlmMovePlayer,
        ErrorCategory::LlmUnblock,
        ErrorCategory::Planning,
        ErrorCategory::Memory,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ErrorCategory::LlmMoveItem => "LLM-MI",
            ErrorCategory::LlmMovePlayer => "LLM-PM",
            ErrorCategory::LlmUnblock => "LLM-UL",
            ErrorCategory::Planning => "WM-Planning",
            ErrorCategory::Memory => "WM-Memory",
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            ErrorCategory::LlmMoveItem => "MI-t",
            ErrorCategory::LlmMovePlayer => "PM-t",
            ErrorCategory::LlmUnblock => "UL-t",
            ErrorCategory::Planning => "Planning",
            ErrorCategory::Memory => "Memory",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown error category '{0}' (expected LLM-MI, LLM-PM, LLM-UL, WM-Planning or WM-Memory)")]
pub struct UnknownCategory(pub String);

impl FromStr for ErrorCategory {
    type Err = UnknownCategory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let cat = match key.as_str() {
            "llm-mi" | "mi" | "mi-t" => ErrorCategory::LlmMoveItem,
            "llm-pm" | "pm" | "pm-t" => ErrorCategory::LlmMovePlayer,
            "llm-ul" | "ul" | "ul-t" => ErrorCategory::LlmUnblock,
            "wm-planning" | "planning" => ErrorCategory::Planning,
            "wm-memory" | "memory" => ErrorCategory::Memory,
            _ => return Err(UnknownCategory(s.to_string())),
        };
        Ok(cat)
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One manual judgement attached to a turn.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorTag {
    pub category: ErrorCategory,
    #[serde(default)]
    pub note: String,
    pub turn: u32,
    #[serde(default)]
    pub annotator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unknown turn {turn} (log has {turns} turns)")]
    UnknownTurn { turn: u32, turns: usize },
}

/// Attaches `tag` to turn `turn`. Returns `false` when an identical tag was
/// already present and nothing changed.
pub fn annotate(
    log: &mut SessionLog,
    turn: u32,
    category: ErrorCategory,
    note: &str,
    annotator: &str,
) -> Result<bool, AnalysisError> {
    let turns = log.turns.len();
    let record = turn
        .checked_sub(1)
        .and_then(|i| log.turns.get_mut(i as usize))
        .ok_or(AnalysisError::UnknownTurn { turn, turns })?;
    let tag = ErrorTag {
        category,
        note: note.to_string(),
        turn,
        annotator: annotator.to_string(),
    };
    if record.annotations.contains(&tag) {
        return Ok(false);
    }
    record.annotations.push(tag);
    Ok(true)
}

pub type Counts = [u32; 5];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub locale: Locale,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TotalsRow {
    pub locale: Locale,
    pub counts: Counts,
}

/// Per-log error counts grouped by language, with one totals row per group.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ErrorTable {
    pub rows: Vec<TableRow>,
    pub totals: Vec<TotalsRow>,
}

fn count_tags(log: &SessionLog) -> Counts {
    let mut counts = [0; 5];
    for tag in log.turns.iter().flat_map(|t| &t.annotations) {
        counts[tag.category.slot()] += 1;
    }
    counts
}

/// Builds the error table for a set of annotated logs.
pub fn report(logs: &[SessionLog]) -> ErrorTable {
    let mut table = ErrorTable::default();
    for locale in Locale::ALL {
        let group: Vec<&SessionLog> = logs.iter().filter(|l| l.header.locale == locale).collect();
        if group.is_empty() {
            continue;
        }
        let mut total = [0; 5];
        for log in group {
            let counts = count_tags(log);
            for (t, c) in total.iter_mut().zip(counts) {
                *t += c;
            }
            table.rows.push(TableRow {
                label: log.row_label(),
                locale,
                counts,
            });
        }
        table.totals.push(TotalsRow {
            locale,
            counts: total,
        });
    }
    table
}

impl ErrorTable {
    pub fn total_for(&self, locale: Locale) -> Option<Counts> {
        self.totals
            .iter()
            .find(|t| t.locale == locale)
            .map(|t| t.counts)
    }

    fn lines(&self) -> Vec<(String, Locale, Counts)> {
        let mut out = Vec::new();
        for total in &self.totals {
            for row in self.rows.iter().filter(|r| r.locale == total.locale) {
                out.push((row.label.clone(), row.locale, row.counts));
            }
            out.push((
                format!("Total ({})", total.locale.language_name()),
                total.locale,
                total.counts,
            ));
        }
        out
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let lines = self.lines();
        let header: Vec<&str> = ErrorCategory::ALL.iter().map(|c| c.column()).collect();
        let label_w = lines
            .iter()
            .map(|(l, _, _)| l.chars().count())
            .chain(std::iter::once("Tester".len()))
            .max()
            .unwrap_or(6);
        let mut out = format!("{:<label_w$}", "Tester");
        for h in &header {
            out.push_str(&format!("  {h:>8}"));
        }
        out.push('\n');
        for (label, _, counts) in lines {
            let pad = label_w - label.chars().count();
            out.push_str(&label);
            out.push_str(&" ".repeat(pad));
            for c in counts {
                out.push_str(&format!("  {c:>8}"));
            }
            out.push('\n');
        }
        out
    }

    /// Comma-separated table with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,language,mi_t,pm_t,ul_t,planning,memory\n");
        for (label, locale, counts) in self.lines() {
            let language = locale.language_name();
            let quoted = if label.contains([',', '"']) {
                format!("\"{}\"", label.replace('"', "\"\""))
            } else {
                label
            };
            let nums: Vec<String> = counts.iter().map(u32::to_string).collect();
            out.push_str(&format!("{quoted},{language},{}\n", nums.join(",")));
        }
        out
    }
}
