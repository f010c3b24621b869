//! Named backend configurations the service can create sessions with.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;
use worldshift_core::{Backend, BackendConfig};

/// Builds a fresh backend for each new session.
pub type BackendFactory = Arc<dyn Fn() -> Box<dyn Backend> + Send + Sync>;

#[derive(Clone)]
pub enum BackendEntry {
    Config(BackendConfig),
    Factory(BackendFactory),
}

impl fmt::Debug for BackendEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendEntry::Config(c) => write!(f, "Config({:?})", c.kind),
            BackendEntry::Factory(_) => f.write_str("Factory"),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default)]
    backends: BTreeMap<String, BackendConfig>,
}

/// Backend id to configuration. Always contains `scripted`.
#[derive(Debug, Clone)]
pub struct BackendRegistry {
    entries: BTreeMap<String, BackendEntry>,
}

impl Default for BackendRegistry {
    fn default() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(
            "scripted".to_string(),
            BackendEntry::Config(BackendConfig::scripted()),
        );
        BackendRegistry { entries }
    }
}

impl BackendRegistry {
    /// Reads a TOML file of `[backends.<id>]` tables on top of the defaults.
    /// Credentials are never stored here, only the names of the environment
    /// variables holding them.
    pub fn from_toml_str(src: &str) -> Result<Self, String> {
        let file: RegistryFile = toml::from_str(src).map_err(|e| e.to_string())?;
        let mut reg = BackendRegistry::default();
        for (id, cfg) in file.backends {
            reg.insert_config(id, cfg);
        }
        Ok(reg)
    }

    pub fn insert_config(&mut self, id: impl Into<String>, config: BackendConfig) {
        self.entries.insert(id.into(), BackendEntry::Config(config));
    }

    pub fn insert_factory(&mut self, id: impl Into<String>, factory: BackendFactory) {
        self.entries.insert(id.into(), BackendEntry::Factory(factory));
    }

    pub fn get(&self, id: &str) -> Option<&BackendEntry> {
        self.entries.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
