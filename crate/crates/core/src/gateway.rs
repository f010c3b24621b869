//! Model backends: the component that turns a [`PromptPair`] into raw
//! suggestion text.
//!
//! Two hosted wire formats are supported (OpenAI-style chat completions and
//! Gemini `generateContent`), plus a scripted backend that replays canned
//! replies so the whole pipeline can run without a model.

use std::collections::VecDeque;
use std::fmt;
use std::path::PathBuf;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::render::PromptPair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("authentication failure: {0}")]
    Auth(String),
    #[error("unexpected response: {0}")]
    BadResponse(String),
    #[error("script exhausted")]
    ScriptExhausted,
    #[error("backend configuration error: {0}")]
    Config(String),
}

impl BackendError {
    pub fn code(&self) -> &'static str {
        match self {
            BackendError::Transport(_) => "transport-failure",
            BackendError::Auth(_) => "auth-failure",
            BackendError::BadResponse(_) => "bad-response",
            BackendError::ScriptExhausted => "script-exhausted",
            BackendError::Config(_) => "backend-config-error",
        }
    }
}

/// Anything that can answer a world-update prompt.
pub trait Backend: Send {
    fn suggest(&mut self, prompt: &PromptPair) -> Result<String, BackendError>;

    /// Short human-readable label (kind and model), never secrets.
    fn label(&self) -> String;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn suggest(&mut self, prompt: &PromptPair) -> Result<String, BackendError> {
        (**self).suggest(prompt)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// On-disk form of a reply script.
///
/// ```toml
/// replies = ["- Moved object: None\n...", "..."]
/// fallback = "..."
///
/// [[overrides]]
/// when = "key"
/// reply = "..."
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplyScript {
    #[serde(default)]
    pub replies: Vec<String>,
    #[serde(default)]
    pub overrides: Vec<ReplyOverride>,
    /// Reply used once the queue is empty and no override matches.
    #[serde(default)]
    pub fallback: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplyOverride {
    /// Case-insensitive substring of the player input.
    pub when: String,
    pub reply: String,
}

impl ReplyScript {
    pub fn from_toml_str(src: &str) -> Result<Self, BackendError> {
        toml::from_str(src).map_err(|e| BackendError::Config(format!("reply script: {e}")))
    }
}

/// Deterministic test double: replies come from a queue, one per call,
/// unless the player input matches an override.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    queue: VecDeque<String>,
    overrides: Vec<ReplyOverride>,
    fallback: Option<String>,
}

impl ScriptedBackend {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedBackend {
            queue: replies.into_iter().map(Into::into).collect(),
            overrides: Vec::new(),
            fallback: None,
        }
    }

    pub fn from_script(script: ReplyScript) -> Self {
        ScriptedBackend {
            queue: script.replies.into(),
            overrides: script.overrides,
            fallback: script.fallback,
        }
    }

    pub fn with_override(mut self, when: impl Into<String>, reply: impl Into<String>) -> Self {
        self.overrides.push(ReplyOverride {
            when: when.into(),
            reply: reply.into(),
        });
        self
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }
}

impl Backend for ScriptedBackend {
    fn suggest(&mut self, prompt: &PromptPair) -> Result<String, BackendError> {
        let input = prompt.player_input.to_lowercase();
        if let Some(o) = self
            .overrides
            .iter()
            .find(|o| input.contains(&o.when.to_lowercase()))
        {
            return Ok(o.reply.clone());
        }
        self.queue
            .pop_front()
            .or_else(|| self.fallback.clone())
            .ok_or(BackendError::ScriptExhausted)
    }

    fn label(&self) -> String {
        "scripted".to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Scripted,
    ChatCompletions,
    Gemini,
}

fn default_timeout() -> f64 {
    60.0
}

fn default_retries() -> u32 {
    2
}

fn default_backoff() -> u64 {
    500
}

/// Backend settings. Credentials are only ever read from the environment
/// variable named by `api_key_env`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default)]
    pub temperature: f32,
    /// Delay before the first retry; doubles on each further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    /// Reply script for the scripted kind. Falls back to the scenario's own
    /// script when absent.
    #[serde(default)]
    pub script: Option<PathBuf>,
}

impl BackendConfig {
    pub fn scripted() -> Self {
        BackendConfig {
            kind: BackendKind::Scripted,
            endpoint: None,
            model: None,
            api_key_env: None,
            timeout_secs: default_timeout(),
            retries: default_retries(),
            temperature: 0.0,
            backoff_ms: default_backoff(),
            script: None,
        }
    }

    pub fn chat_completions(endpoint: &str, model: &str, api_key_env: &str) -> Self {
        BackendConfig {
            kind: BackendKind::ChatCompletions,
            endpoint: Some(endpoint.to_string()),
            model: Some(model.to_string()),
            api_key_env: Some(api_key_env.to_string()),
            ..BackendConfig::scripted()
        }
    }

    pub fn gemini(model: &str, api_key_env: &str) -> Self {
        BackendConfig {
            kind: BackendKind::Gemini,
            endpoint: Some(GEMINI_ENDPOINT.to_string()),
            model: Some(model.to_string()),
            api_key_env: Some(api_key_env.to_string()),
            ..BackendConfig::scripted()
        }
    }

    /// Constructs the backend. `scenario_script` is the scenario's bundled
    /// reply script, used by the scripted kind when no script path is set.
    pub fn build(&self, scenario_script: Option<&str>) -> Result<Box<dyn Backend>, BackendError> {
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return Err(BackendError::Config("timeout must be positive".into()));
        }
        match self.kind {
            BackendKind::Scripted => {
                let script = match (&self.script, scenario_script) {
                    (Some(path), _) => {
                        let src = std::fs::read_to_string(path).map_err(|e| {
                            BackendError::Config(format!("reading {}: {e}", path.display()))
                        })?;
                        ReplyScript::from_toml_str(&src)?
                    }
                    (None, Some(src)) => ReplyScript::from_toml_str(src)?,
                    (None, None) => ReplyScript::default(),
                };
                Ok(Box::new(ScriptedBackend::from_script(script)))
            }
            BackendKind::ChatCompletions | BackendKind::Gemini => {
                Ok(Box::new(HttpBackend::new(self)?))
            }
        }
    }
}

const GEMINI_ENDPOINT: &str = "https://generativelanguage.googleapis.com/v1beta";

struct Secret(String);

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<redacted>")
    }
}

/// Client for hosted models. Each call sends exactly one system and one
/// user message; no history is kept between calls.
#[derive(Debug)]
pub struct HttpBackend {
    kind: BackendKind,
    url: String,
    model: String,
    key: Secret,
    temperature: f32,
    retries: u32,
    backoff: Duration,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(config: &BackendConfig) -> Result<Self, BackendError> {
        let model = config
            .model
            .clone()
            .ok_or_else(|| BackendError::Config("model is required".into()))?;
        let env = config
            .api_key_env
            .as_deref()
            .ok_or_else(|| BackendError::Config("api_key_env is required".into()))?;
        let key = std::env::var(env).map_err(|_| {
            BackendError::Config(format!("environment variable {env} is not set"))
        })?;
        let url = match config.kind {
            BackendKind::ChatCompletions => config
                .endpoint
                .clone()
                .ok_or_else(|| BackendError::Config("endpoint is required".into()))?,
            BackendKind::Gemini => format!(
                "{}/models/{}:generateContent",
                config
                    .endpoint
                    .as_deref()
                    .unwrap_or(GEMINI_ENDPOINT)
                    .trim_end_matches('/'),
                model
            ),
            BackendKind::Scripted => {
                return Err(BackendError::Config("scripted is not an HTTP backend".into()))
            }
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(HttpBackend {
            kind: config.kind,
            url,
            model,
            key: Secret(key),
            temperature: config.temperature,
            retries: config.retries,
            backoff: Duration::from_millis(config.backoff_ms),
            agent,
        })
    }

    fn request_body(&self, prompt: &PromptPair) -> Value {
        match self.kind {
            BackendKind::Gemini => json!({
                "systemInstruction": { "parts": [{ "text": prompt.system_msg }] },
                "contents": [{ "role": "user", "parts": [{ "text": prompt.user_msg }] }],
                "generationConfig": { "temperature": self.temperature },
            }),
            _ => json!({
                "model": self.model,
                "temperature": self.temperature,
                "messages": [
                    { "role": "system", "content": prompt.system_msg },
                    { "role": "user", "content": prompt.user_msg },
                ],
            }),
        }
    }

    fn extract_text(&self, body: &Value) -> Option<String> {
        match self.kind {
            BackendKind::Gemini => {
                let parts = body
                    .pointer("/candidates/0/content/parts")?
                    .as_array()?
                    .iter()
                    .filter_map(|p| p.get("text").and_then(Value::as_str))
                    .collect::<String>();
                Some(parts)
            }
            _ => body
                .pointer("/choices/0/message/content")
                .and_then(Value::as_str)
                .map(str::to_string),
        }
    }

    fn attempt(&self, body: &Value) -> Result<String, Attempt> {
        let req = self.agent.post(&self.url);
        let req = match self.kind {
            BackendKind::Gemini => req.header("x-goog-api-key", &self.key.0),
            _ => req.header("Authorization", &format!("Bearer {}", self.key.0)),
        };
        let mut resp = req
            .send_json(body)
            .map_err(|e| Attempt::Retry(BackendError::Transport(e.to_string())))?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => {}
            401 | 403 => {
                return Err(Attempt::Fatal(BackendError::Auth(format!(
                    "endpoint answered {status}"
                ))))
            }
            429 | 500..=599 => {
                return Err(Attempt::Retry(BackendError::Transport(format!(
                    "endpoint answered {status}"
                ))))
            }
            _ => {
                return Err(Attempt::Fatal(BackendError::BadResponse(format!(
                    "endpoint answered {status}"
                ))))
            }
        }
        let json: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| Attempt::Retry(BackendError::Transport(e.to_string())))?;
        self.extract_text(&json).ok_or_else(|| {
            Attempt::Fatal(BackendError::BadResponse(
                "no completion text in response".into(),
            ))
        })
    }
}

enum Attempt {
    Retry(BackendError),
    Fatal(BackendError),
}

impl Backend for HttpBackend {
    fn suggest(&mut self, prompt: &PromptPair) -> Result<String, BackendError> {
        let body = self.request_body(prompt);
        let mut delay = self.backoff;
        let mut last = BackendError::Transport("no attempt made".into());
        for attempt in 0..=self.retries {
            if attempt > 0 {
                thread::sleep(delay);
                delay = delay.saturating_mul(2);
            }
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) => last = e,
            }
        }
        Err(last)
    }

    fn label(&self) -> String {
        let kind = match self.kind {
            BackendKind::Gemini => "gemini",
            _ => "chat-completions",
        };
        format!("{kind}:{}", self.model)
    }
}
