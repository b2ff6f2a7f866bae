//! File loading and artifact writing. Every JSON artifact carries a
//! `meta` object and every CSV starts with a `#` line holding the same.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use persuasion_core::report::VERSION;
use persuasion_core::{Error, Instance, LeakagePattern, SignalingScheme};

use crate::app::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub instance_hash: Option<String>,
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(inst: Option<&Instance>, seed: Option<u64>) -> Self {
        Meta { version: VERSION, instance_hash: inst.map(Instance::hash), seed }
    }

    pub fn csv_comment(&self) -> String {
        format!(
            "# persuade {} instance_hash={} seed={}\n",
            self.version,
            self.instance_hash.as_deref().unwrap_or("-"),
            self.seed.map_or("-".to_string(), |s| s.to_string())
        )
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Core(Error::Domain(format!("{}: {e}", path.display()))))
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    load(path)
}

pub fn load_scheme(path: &Path) -> Result<SignalingScheme, CliError> {
    load(path)
}

pub fn load_pattern(path: &Path) -> Result<LeakagePattern, CliError> {
    load(path)
}

/// `value` as pretty JSON with `meta` appended as the last key.
pub fn with_meta<T: Serialize>(value: &T, meta: &Meta) -> String {
    let mut v = serde_json::to_value(value).expect("artifact serializes");
    let meta = serde_json::to_value(meta).expect("meta serializes");
    match &mut v {
        Value::Object(map) => {
            map.insert("meta".into(), meta);
        }
        other => {
            let mut map = Map::new();
            map.insert("value".into(), other.take());
            map.insert("meta".into(), meta);
            v = Value::Object(map);
        }
    }
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}
