//! Commands behind the `worldshift` binary. Each returns the text to print
//! on success or a [`CliError`] carrying a stable error code.

use std::fmt;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use worldshift_core::engine::EngineOptions;
use worldshift_core::session::{SessionOptions, SessionStatus};
use worldshift_core::{
    annotate, new_session, report, BackendConfig, ErrorCategory, Locale, ScenarioCatalog,
    SessionError, SessionLog,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    /// Single machine-readable line, e.g.
    /// `error: {"code":"unknown-turn","message":"..."}`.
    pub fn line(&self) -> String {
        let body = serde_json::json!({ "code": self.code, "message": self.message });
        format!("error: {body}")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        CliError::new(e.code(), e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io-error", format!("reading {}: {e}", path.display())))
}

/// Writes via a temporary file so an interrupted write never truncates a log.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CliError::new("io-error", format!("writing {}: {e}", path.display())))
}

pub fn load_log(path: &Path) -> Result<SessionLog, CliError> {
    SessionLog::from_jsonl(&read(path)?)
        .map_err(|e| CliError::new("malformed-log", format!("{}: {e}", path.display())))
}

/// Re-executes every turn from the previous snapshot and compares with the
/// recorded outcome.
pub fn replay(path: &Path) -> Result<String, CliError> {
    let log = load_log(path)?;
    let steps = log.replay();
    let mut out = String::new();
    let mut bad = Vec::new();
    for (step, turn) in steps.iter().zip(&log.turns) {
        let applied = step.reports.iter().filter(|r| r.is_applied()).count();
        let rejected = step.reports.len() - applied;
        let verdict = if step.is_consistent() {
            "ok".to_string()
        } else {
            bad.push(step.index);
            let mut parts = Vec::new();
            if !step.reports_match {
                parts.push("reports");
            }
            if !step.world_match {
                parts.push("world");
            }
            if !step.objective_match {
                parts.push("objective");
            }
            format!("MISMATCH ({})", parts.join(", "))
        };
        out.push_str(&format!(
            "turn {}: {verdict}  applied={applied} rejected={rejected}  input={:?}\n",
            step.index, turn.player_input
        ));
        for r in step.reports.iter().filter(|r| !r.is_applied()) {
            let reason = r.reason.map_or("", |x| x.code());
            out.push_str(&format!("  rejected {}: {reason}\n", describe(&r.transformation)));
        }
    }
    if !bad.is_empty() {
        let list: Vec<String> = bad.iter().map(u32::to_string).collect();
        return Err(CliError::new(
            "replay-mismatch",
            format!("turns {} do not match the log", list.join(", ")),
        ));
    }
    out.push_str(&format!("{} turns replayed, all consistent\n", steps.len()));
    Ok(out)
}

fn describe(t: &worldshift_core::Transformation) -> String {
    use worldshift_core::Transformation::*;
    match t {
        MoveItem { item, destination } => format!("MI-t <{item}> -> <{destination}>"),
        UnblockLocation { target } => format!("UL-t <{target}>"),
        MovePlayer { target } => format!("PM-t <{target}>"),
    }
}

/// Adds one error tag to a turn and rewrites the log in place.
pub fn annotate_file(
    path: &Path,
    turn: u32,
    category: &str,
    note: &str,
    annotator: &str,
) -> Result<String, CliError> {
    let category = ErrorCategory::from_str(category)
        .map_err(|e| CliError::new("unknown-category", e.to_string()))?;
    let mut log = load_log(path)?;
    let changed = annotate(&mut log, turn, category, note, annotator)
        .map_err(|e| CliError::new("unknown-turn", e.to_string()))?;
    if changed {
        write_atomic(path, &log.to_jsonl())?;
        Ok(format!("turn {turn}: added {category}\n"))
    } else {
        Ok(format!("turn {turn}: {category} already present, log unchanged\n"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

pub fn report_files(paths: &[PathBuf], format: TableFormat) -> Result<String, CliError> {
    let logs = paths.iter().map(|p| load_log(p)).collect::<Result<Vec<_>, _>>()?;
    let table = report(&logs);
    Ok(match format {
        TableFormat::Text => table.to_text(),
        TableFormat::Csv => table.to_csv(),
    })
}

pub struct PlayOptions {
    pub scenario: String,
    pub scenarios_dir: Option<PathBuf>,
    pub backend_config: Option<PathBuf>,
    pub locale: Option<Locale>,
    pub tester: Option<String>,
    pub log: Option<PathBuf>,
    pub strict_puzzles: bool,
    pub debug: bool,
}

/// Plays a session with one player input per line of `input`, writing each
/// narration (and, with `debug`, every report) to `out`.
pub fn play(
    opts: &PlayOptions,
    input: impl BufRead,
    out: &mut impl std::io::Write,
) -> Result<(), CliError> {
    let catalog = match &opts.scenarios_dir {
        Some(dir) => ScenarioCatalog::from_dir(dir)
            .map_err(|e| CliError::new("invalid-scenario", e.to_string()))?,
        None => ScenarioCatalog::bundled(),
    };
    let backend = match &opts.backend_config {
        Some(path) => toml::from_str::<BackendConfig>(&read(path)?)
            .map_err(|e| CliError::new("backend-config-error", format!("{}: {e}", path.display())))?,
        None => BackendConfig::scripted(),
    };
    let scenario = catalog
        .get(&opts.scenario)
        .map_err(|e| CliError::new("unknown-scenario", e.to_string()))?;
    let locale = opts.locale.unwrap_or(scenario.document.metadata.locale);
    let mut session = new_session(&catalog, &opts.scenario, &backend, locale)?.with_options(
        SessionOptions {
            engine: EngineOptions {
                strict_puzzles: opts.strict_puzzles,
            },
            ..SessionOptions::default()
        },
    );
    if let Some(t) = &opts.tester {
        session = session.with_tester(t.clone());
    }
    let io = |e: std::io::Error| CliError::new("io-error", e.to_string());
    if let Some(intro) = &scenario.document.metadata.intro {
        writeln!(out, "{intro}").map_err(io)?;
    }
    for line in input.lines() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let record = session.play_turn(&line)?;
        writeln!(out, "> {line}").map_err(io)?;
        writeln!(out, "{}", record.narration.as_deref().unwrap_or("")).map_err(io)?;
        if opts.debug {
            for r in &record.reports {
                let verdict = r.reason.map_or("applied", |x| x.code());
                writeln!(out, "  [{verdict}] {}", describe(&r.transformation)).map_err(io)?;
            }
        }
        if let Some(path) = &opts.log {
            write_atomic(path, &session.export_log().to_jsonl())?;
        }
        if session.status() == SessionStatus::Completed {
            writeln!(out, "*** objective reached in {} turns ***", session.turns().len())
                .map_err(io)?;
            break;
        }
    }
    if let Some(path) = &opts.log {
        write_atomic(path, &session.export_log().to_jsonl())?;
    }
    Ok(())
}
