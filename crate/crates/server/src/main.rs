use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use worldshift_core::ScenarioCatalog;
use worldshift_server::{router, AppState, BackendRegistry};

/// Serve worldshift sessions over HTTP.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "WORLDSHIFT_BIND", default_value = "127.0.0.1:8080")]
    bind: String,
    /// Directory of scenario folders. Defaults to the bundled scenarios.
    #[arg(long, env = "WORLDSHIFT_SCENARIOS")]
    scenarios: Option<PathBuf>,
    /// TOML file of `[backends.<id>]` tables. `scripted` is always available.
    #[arg(long, env = "WORLDSHIFT_BACKENDS")]
    backends: Option<PathBuf>,
    /// Write each session's JSONL log here after every turn.
    #[arg(long, env = "WORLDSHIFT_LOG_DIR")]
    log_dir: Option<PathBuf>,
}

fn load(args: &Args) -> Result<AppState, String> {
    let catalog = match &args.scenarios {
        Some(dir) => ScenarioCatalog::from_dir(dir).map_err(|e| e.to_string())?,
        None => ScenarioCatalog::bundled(),
    };
    let backends = match &args.backends {
        Some(path) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            BackendRegistry::from_toml_str(&src)
                .map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => BackendRegistry::default(),
    };
    if let Some(dir) = &args.log_dir {
        std::fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    }
    Ok(AppState::new(catalog, backends, args.log_dir.clone()))
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let state = match load(&args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let listener = match tokio::net::TcpListener::bind(&args.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: binding {}: {e}", args.bind);
            return ExitCode::FAILURE;
        }
    };
    eprintln!("listening on http://{}", args.bind);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
    {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
