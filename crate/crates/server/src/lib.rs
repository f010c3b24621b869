//! HTTP facade over [`worldshift_core::Session`].
//!
//! Sessions live in memory. Each turn runs on a blocking worker; a second
//! turn submitted while one is running gets `409` instead of queueing.

mod api;
mod registry;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use worldshift_core::session::SessionStatus;
use worldshift_core::{Locale, ScenarioCatalog, Session, TurnRecord};

pub use api::router;
pub use registry::{BackendEntry, BackendFactory, BackendRegistry};

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    catalog: ScenarioCatalog,
    backends: BackendRegistry,
    sessions: RwLock<HashMap<String, Arc<SessionSlot>>>,
    log_dir: Option<PathBuf>,
}

/// One session plus what readers may see of it without waiting for a
/// running turn.
struct SessionSlot {
    debug: bool,
    busy: AtomicBool,
    session: Mutex<Session>,
    view: RwLock<SessionView>,
}

#[derive(Clone)]
struct SessionView {
    scenario_id: String,
    locale: Locale,
    status: SessionStatus,
    turns: Vec<TurnRecord>,
}

/// Clears the slot's busy flag when the turn finishes, however it ends.
struct TurnGuard(Arc<SessionSlot>);

impl Drop for TurnGuard {
    fn drop(&mut self) {
        self.0.busy.store(false, Ordering::Release);
    }
}

impl SessionSlot {
    fn try_begin_turn(self: &Arc<Self>) -> Option<TurnGuard> {
        self.busy
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .ok()
            .map(|_| TurnGuard(Arc::clone(self)))
    }
}

impl AppState {
    pub fn new(catalog: ScenarioCatalog, backends: BackendRegistry, log_dir: Option<PathBuf>) -> Self {
        AppState {
            inner: Arc::new(Inner {
                catalog,
                backends,
                sessions: RwLock::new(HashMap::new()),
                log_dir,
            }),
        }
    }

    fn slot(&self, id: &str) -> Option<Arc<SessionSlot>> {
        self.inner.sessions.read().unwrap().get(id).cloned()
    }

    fn insert(&self, session: Session, debug: bool) -> Arc<SessionSlot> {
        let view = SessionView {
            scenario_id: session.scenario_id().to_string(),
            locale: session.locale(),
            status: session.status(),
            turns: Vec::new(),
        };
        let id = session.id().to_string();
        let slot = Arc::new(SessionSlot {
            debug,
            busy: AtomicBool::new(false),
            session: Mutex::new(session),
            view: RwLock::new(view),
        });
        self.inner
            .sessions
            .write()
            .unwrap()
            .insert(id, Arc::clone(&slot));
        slot
    }

    /// Rewrites the session's JSONL log when a log directory is configured.
    fn write_log(&self, session: &Session) {
        let Some(dir) = &self.inner.log_dir else {
            return;
        };
        let path = dir.join(format!("{}.jsonl", session.id()));
        let tmp = path.with_extension("jsonl.tmp");
        let result = std::fs::write(&tmp, session.export_log().to_jsonl())
            .and_then(|_| std::fs::rename(&tmp, &path));
        if let Err(e) = result {
            eprintln!("warning: could not write {}: {e}", path.display());
        }
    }
}
