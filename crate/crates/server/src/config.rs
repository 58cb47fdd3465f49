//! Server configuration: one TOML file with a `[server]` table and an
//! optional `[rules]` table of rule overrides.
//!
//! ```toml
//! [server]
//! port = 8080
//! corpus = "corpus"
//! log_dir = "logs"
//! zones = ["main"]
//! heartbeat_secs = 15
//! missed_heartbeats = 2
//!
//! [rules]
//! path_length = 30
//! ```

use std::path::{Path, PathBuf};

use miboard_core::RulesConfig;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("invalid rules: {0}")]
    Rules(#[from] miboard_core::GameError),
    #[error("at least one zone must be configured")]
    NoZones,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileServer {
    port: Option<u16>,
    corpus: Option<PathBuf>,
    log_dir: Option<PathBuf>,
    zones: Option<Vec<String>>,
    heartbeat_secs: Option<u64>,
    missed_heartbeats: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    #[serde(default)]
    server: FileServer,
    #[serde(default)]
    rules: toml::Table,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub port: u16,
    pub corpus: PathBuf,
    pub log_dir: PathBuf,
    /// The first zone is the one `JoinZone` uses when it names none.
    pub zones: Vec<String>,
    pub heartbeat_secs: u64,
    pub missed_heartbeats: u32,
    /// Base seed; game `n` of this process uses `seed + n - 1`.
    pub seed: Option<u64>,
    pub virtual_clock: bool,
    pub rules: RulesConfig,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            port: 8080,
            corpus: PathBuf::from("corpus"),
            log_dir: PathBuf::from("logs"),
            zones: vec!["main".into()],
            heartbeat_secs: 15,
            missed_heartbeats: 2,
            seed: None,
            virtual_clock: false,
            rules: RulesConfig::default(),
        }
    }
}

/// Values given on the command line or in the environment. They win over the
/// file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub port: Option<u16>,
    pub corpus: Option<PathBuf>,
    pub log_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub virtual_clock: bool,
}

impl ServerConfig {
    pub fn parse(source: &str, path: &Path, overrides: Overrides) -> Result<ServerConfig, ConfigError> {
        let file: File = toml::from_str(source).map_err(|source| ConfigError::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        // Relative paths in the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        let rel = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        Self::build(file, overrides, rel)
    }

    pub fn load(path: Option<&Path>, overrides: Overrides) -> Result<ServerConfig, ConfigError> {
        match path {
            Some(path) => {
                let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                Self::parse(&source, path, overrides)
            }
            None => Self::build(File::default(), overrides, |p| p),
        }
    }

    fn build(file: File, o: Overrides, rel: impl Fn(PathBuf) -> PathBuf) -> Result<ServerConfig, ConfigError> {
        let d = ServerConfig::default();
        let s = file.server;
        let zones = s.zones.unwrap_or(d.zones);
        if zones.is_empty() {
            return Err(ConfigError::NoZones);
        }
        Ok(ServerConfig {
            port: o.port.or(s.port).unwrap_or(d.port),
            corpus: o.corpus.or(s.corpus.map(&rel)).unwrap_or(d.corpus),
            log_dir: o.log_dir.or(s.log_dir.map(&rel)).unwrap_or(d.log_dir),
            zones,
            heartbeat_secs: s.heartbeat_secs.unwrap_or(d.heartbeat_secs),
            missed_heartbeats: s.missed_heartbeats.unwrap_or(d.missed_heartbeats),
            seed: o.seed,
            virtual_clock: o.virtual_clock,
            rules: RulesConfig::with_overrides(file.rules)?,
        })
    }
}
