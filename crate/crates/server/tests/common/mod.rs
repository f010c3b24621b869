#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};
use worldshift_core::{Backend, BackendError, PromptPair, ScenarioCatalog};
use worldshift_server::{router, AppState, BackendRegistry};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Runs the service on an ephemeral port for the rest of the test process.
pub fn spawn(backends: BackendRegistry, log_dir: Option<PathBuf>) -> String {
    let state = AppState::new(ScenarioCatalog::bundled(), backends, log_dir);
    let std_listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = std_listener.local_addr().unwrap();
    std_listener.set_nonblocking(true).unwrap();
    thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(std_listener).unwrap();
            axum::serve(listener, router(state)).await.unwrap();
        });
    });
    format!("http://{addr}")
}

pub struct Client {
    agent: ureq::Agent,
    pub base: String,
}

impl Client {
    pub fn new(base: String) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        Client { agent, base }
    }

    fn finish(mut resp: ureq::http::Response<ureq::Body>) -> (u16, String) {
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().unwrap();
        (status, body)
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        let (s, b) = self.get_raw(path);
        (s, serde_json::from_str(&b).unwrap())
    }

    pub fn get_raw(&self, path: &str) -> (u16, String) {
        Self::finish(self.agent.get(&format!("{}{path}", self.base)).call().unwrap())
    }

    pub fn post(&self, path: &str, body: Value) -> (u16, Value) {
        let (s, b) = self.post_raw(path, &body.to_string());
        (s, serde_json::from_str(&b).unwrap())
    }

    pub fn post_raw(&self, path: &str, body: &str) -> (u16, String) {
        Self::finish(
            self.agent
                .post(&format!("{}{path}", self.base))
                .header("Content-Type", "application/json")
                .send(body)
                .unwrap(),
        )
    }

    pub fn create(&self, scenario: &str, backend: &str, debug: bool) -> String {
        let (status, body) = self.post(
            "/sessions",
            json!({ "scenario_id": scenario, "backend": backend, "debug": debug }),
        );
        assert_eq!(status, 201, "{body}");
        body["session_id"].as_str().unwrap().to_string()
    }

    pub fn turn(&self, id: &str, input: &str) -> (u16, Value) {
        self.post(&format!("/sessions/{id}/turns"), json!({ "input": input }))
    }
}

/// Backend whose replies wait until the test opens the gate.
#[derive(Clone, Default)]
pub struct Gate {
    state: Arc<(Mutex<(bool, usize)>, Condvar)>,
}

impl Gate {
    pub fn open(&self) {
        let (m, cv) = &*self.state;
        m.lock().unwrap().0 = true;
        cv.notify_all();
    }

    /// Blocks until at least `n` calls are waiting or have passed.
    pub fn wait_for_callers(&self, n: usize) {
        let (m, cv) = &*self.state;
        let mut g = m.lock().unwrap();
        while g.1 < n {
            g = cv.wait(g).unwrap();
        }
    }

    pub fn backend(&self, reply: &str) -> GatedBackend {
        GatedBackend {
            gate: self.clone(),
            reply: reply.to_string(),
        }
    }
}

pub struct GatedBackend {
    gate: Gate,
    reply: String,
}

impl Backend for GatedBackend {
    fn suggest(&mut self, _: &PromptPair) -> Result<String, BackendError> {
        let (m, cv) = &*self.gate.state;
        let mut g = m.lock().unwrap();
        g.1 += 1;
        cv.notify_all();
        while !g.0 {
            g = cv.wait(g).unwrap();
        }
        Ok(self.reply.clone())
    }

    fn label(&self) -> String {
        "gated".into()
    }
}

/// Upstream stand-in: answers one connection per `(status, body)` pair.
pub fn stub_upstream(responses: Vec<(u16, String)>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for (status, body) in responses {
            let Ok((stream, _)) = listener.accept() else {
                return;
            };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        len = v.trim().parse().unwrap();
                    }
                }
            }
            let mut raw = vec![0; len];
            reader.read_exact(&mut raw).unwrap();
            let mut stream = stream;
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    format!("http://{addr}")
}

pub fn chat_reply(text: &str) -> String {
    json!({ "choices": [{ "message": { "role": "assistant", "content": text } }] }).to_string()
}

pub const NOTHING: &str = "- Moved object: None\n- Blocked passages now available: None\n- Your location changed: None\n# Nothing happened... #";
