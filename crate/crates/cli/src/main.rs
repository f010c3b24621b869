use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use worldshift_cli::{annotate_file, play, replay, report_files, CliError, PlayOptions, TableFormat};
use worldshift_core::Locale;

/// Replay, annotate and tabulate worldshift session logs.
#[derive(Parser, Debug)]
#[command(name = "worldshift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Re-run every turn of a log against its snapshots.
    Replay { log: PathBuf },
    /// Tag one turn with an error category (LLM-MI, LLM-PM, LLM-UL,
    /// WM-Planning, WM-Memory). The log is updated in place.
    Annotate {
        log: PathBuf,
        turn: u32,
        category: String,
        #[arg(long, default_value = "")]
        note: String,
        #[arg(long, default_value = "")]
        annotator: String,
    },
    /// Error counts per log and per language.
    Report {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Play a scenario with one player input per line on stdin.
    Play {
        scenario: String,
        /// Directory of scenario folders instead of the bundled ones.
        #[arg(long)]
        scenarios: Option<PathBuf>,
        /// TOML file with one backend configuration; defaults to scripted.
        #[arg(long)]
        backend_config: Option<PathBuf>,
        #[arg(long)]
        locale: Option<Locale>,
        #[arg(long)]
        tester: Option<String>,
        /// Write the session log here after every turn.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        strict_puzzles: bool,
        /// Print each transformation report.
        #[arg(long)]
        debug: bool,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Replay { log } => replay(&log),
        Command::Annotate {
            log,
            turn,
            category,
            note,
            annotator,
        } => annotate_file(&log, turn, &category, &note, &annotator),
        Command::Report { logs, format } => report_files(&logs, format),
        Command::Play {
            scenario,
            scenarios,
            backend_config,
            locale,
            tester,
            log,
            strict_puzzles,
            debug,
        } => {
            let opts = PlayOptions {
                scenario,
                scenarios_dir: scenarios,
                backend_config,
                locale,
                tester,
                log,
                strict_puzzles,
                debug,
            };
            let stdin = std::io::stdin();
            play(&opts, stdin.lock(), &mut std::io::stdout())?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::FAILURE
        }
    }
}
