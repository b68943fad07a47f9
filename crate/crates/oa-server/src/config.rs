//! Service configuration: file, environment, and flag layers.
//!
//! Values are merged lowest-precedence first: config file, then `OASTORE_*`
//! environment variables, then explicit overrides (command-line flags).
//! Files come in two formats, JSON (`{"bind": "..."}`) or `key = value` lines;
//! both use the same key names as the environment variables, lowercased.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use oa_core::{Iri, VocabularyConfig};
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_BIND: &str = "127.0.0.1:8154";
pub const DEFAULT_MAX_BODY_BYTES: usize = 1024 * 1024;
pub const ENV_PREFIX: &str = "OASTORE_";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: String,
    pub base_uri: Iri,
    pub store_path: PathBuf,
    pub vocabulary: VocabularyConfig,
    pub max_body_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("config file {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("invalid value for {key}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error(
        "missing required setting {0} (set it in the config file, {ENV_PREFIX}{1}, or a flag)"
    )]
    Missing(&'static str, &'static str),
}

/// Unvalidated layer of settings; later layers override earlier ones
/// field by field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub bind: Option<String>,
    pub base_uri: Option<String>,
    pub store: Option<String>,
    pub max_body_bytes: Option<String>,
    pub oa_ns: Option<String>,
    pub graph_type_iri: Option<String>,
    pub context_iri: Option<String>,
}

impl ConfigLayer {
    fn merge(mut self, over: ConfigLayer) -> ConfigLayer {
        self.bind = over.bind.or(self.bind);
        self.base_uri = over.base_uri.or(self.base_uri);
        self.store = over.store.or(self.store);
        self.max_body_bytes = over.max_body_bytes.or(self.max_body_bytes);
        self.oa_ns = over.oa_ns.or(self.oa_ns);
        self.graph_type_iri = over.graph_type_iri.or(self.graph_type_iri);
        self.context_iri = over.context_iri.or(self.context_iri);
        self
    }

    pub fn from_file(path: &Path) -> Result<ConfigLayer, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let malformed = |reason: String| ConfigError::Malformed {
            path: path.display().to_string(),
            reason,
        };
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(&text).map_err(|e| malformed(e.to_string()));
        }
        let mut pairs = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| malformed(format!("line {}: expected key = value", n + 1)))?;
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }
        let json = serde_json::to_value(pairs).expect("string map is valid json");
        serde_json::from_value(json).map_err(|e| malformed(e.to_string()))
    }

    pub fn from_env(var: impl Fn(&str) -> Option<String>) -> ConfigLayer {
        ConfigLayer {
            bind: var("BIND"),
            base_uri: var("BASE_URI"),
            store: var("STORE"),
            max_body_bytes: var("MAX_BODY_BYTES"),
            oa_ns: var("OA_NS"),
            graph_type_iri: var("GRAPH_TYPE_IRI"),
            context_iri: var("CONTEXT_IRI"),
        }
    }

    pub fn process_env() -> ConfigLayer {
        ConfigLayer::from_env(|name| std::env::var(format!("{ENV_PREFIX}{name}")).ok())
    }
}

fn iri_value(key: &str, raw: &str) -> Result<Iri, ConfigError> {
    Iri::new(raw).map_err(|e| ConfigError::InvalidValue {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

impl ServiceConfig {
    /// Resolves the layered settings into a validated configuration.
    pub fn resolve(layers: Vec<ConfigLayer>) -> Result<ServiceConfig, ConfigError> {
        let merged = layers
            .into_iter()
            .fold(ConfigLayer::default(), ConfigLayer::merge);

        let base_raw = merged
            .base_uri
            .ok_or(ConfigError::Missing("base_uri", "BASE_URI"))?;
        if base_raw.ends_with('/') {
            return Err(ConfigError::InvalidValue {
                key: "base_uri".to_string(),
                reason: "must not end with a slash".to_string(),
            });
        }
        let base_uri = iri_value("base_uri", &base_raw)?;

        let store_path = PathBuf::from(merged.store.ok_or(ConfigError::Missing("store", "STORE"))?);

        let max_body_bytes = match merged.max_body_bytes {
            None => DEFAULT_MAX_BODY_BYTES,
            Some(raw) => raw.parse().map_err(|_| ConfigError::InvalidValue {
                key: "max_body_bytes".to_string(),
                reason: format!("{raw:?} is not a byte count"),
            })?,
        };

        let mut vocabulary = VocabularyConfig::default();
        if let Some(raw) = merged.oa_ns {
            vocabulary.oa_ns = iri_value("oa_ns", &raw)?;
        }
        if let Some(raw) = merged.graph_type_iri {
            vocabulary.graph_type_iri = iri_value("graph_type_iri", &raw)?;
        }
        if let Some(raw) = merged.context_iri {
            vocabulary.context_iri = iri_value("context_iri", &raw)?;
        }

        Ok(ServiceConfig {
            bind: merged.bind.unwrap_or_else(|| DEFAULT_BIND.to_string()),
            base_uri,
            store_path,
            vocabulary,
            max_body_bytes,
        })
    }

    /// File, then process environment, then flag overrides.
    pub fn load(file: Option<&Path>, overrides: ConfigLayer) -> Result<ServiceConfig, ConfigError> {
        let mut layers = Vec::new();
        if let Some(path) = file {
            layers.push(ConfigLayer::from_file(path)?);
        }
        layers.push(ConfigLayer::process_env());
        layers.push(overrides);
        ServiceConfig::resolve(layers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn layer(base: &str, store: &str) -> ConfigLayer {
        ConfigLayer {
            base_uri: Some(base.to_string()),
            store: Some(store.to_string()),
            ..ConfigLayer::default()
        }
    }

    #[test]
    fn json_and_key_value_files_parse_alike() {
        let dir = tempfile::tempdir().unwrap();
        let json_path = dir.path().join("svc.json");
        std::fs::write(
            &json_path,
            r#"{ "bind": "0.0.0.0:9000", "base_uri": "http://a.example", "store": "/tmp/s" }"#,
        )
        .unwrap();
        let kv_path = dir.path().join("svc.conf");
        let mut f = std::fs::File::create(&kv_path).unwrap();
        writeln!(f, "# the service").unwrap();
        writeln!(f, "bind = 0.0.0.0:9000").unwrap();
        writeln!(f, "base_uri = http://a.example").unwrap();
        writeln!(f, "store = /tmp/s").unwrap();

        let a = ServiceConfig::resolve(vec![ConfigLayer::from_file(&json_path).unwrap()]).unwrap();
        let b = ServiceConfig::resolve(vec![ConfigLayer::from_file(&kv_path).unwrap()]).unwrap();
        assert_eq!(a.bind, b.bind);
        assert_eq!(a.base_uri, b.base_uri);
        assert_eq!(a.store_path, b.store_path);
        assert_eq!(a.max_body_bytes, DEFAULT_MAX_BODY_BYTES);
    }

    #[test]
    fn later_layers_win() {
        let file = layer("http://file.example", "/file");
        let env = ConfigLayer {
            base_uri: Some("http://env.example".to_string()),
            ..ConfigLayer::default()
        };
        let flags = ConfigLayer {
            store: Some("/flags".to_string()),
            ..ConfigLayer::default()
        };
        let cfg = ServiceConfig::resolve(vec![file, env, flags]).unwrap();
        assert_eq!(cfg.base_uri.as_str(), "http://env.example");
        assert_eq!(cfg.store_path, PathBuf::from("/flags"));
    }

    #[test]
    fn base_uri_must_be_absolute_without_trailing_slash() {
        let slash = ServiceConfig::resolve(vec![layer("http://a.example/", "/s")]);
        assert!(matches!(slash, Err(ConfigError::InvalidValue { .. })));
        let relative = ServiceConfig::resolve(vec![layer("not-an-iri no scheme", "/s")]);
        assert!(matches!(relative, Err(ConfigError::InvalidValue { .. })));
        let missing = ServiceConfig::resolve(vec![ConfigLayer::default()]);
        assert!(matches!(missing, Err(ConfigError::Missing("base_uri", _))));
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("svc.conf");
        std::fs::write(&path, "bnid = 1.2.3.4:9\n").unwrap();
        assert!(matches!(
            ConfigLayer::from_file(&path),
            Err(ConfigError::Malformed { .. })
        ));
    }
}
