//! Single-airport scenario files.
//!
//! ```json
//! {
//!   "slots":   [{"id": "s1", "capacity": 1, "time_index": 0}],
//!   "flights": [{"id": "f1", "airline": "AA", "window": ["s1"], "costs": {"s1": 0}}]
//! }
//! ```
//!
//! Unknown fields are rejected. `flights` may be omitted. Parse errors carry
//! the path of the offending field, e.g. `flights[0].costs.s1`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use slotmarket_core::Instance;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
}

/// Deserializes JSON, reporting the path to the field that failed.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::Parse { path, message: e.into_inner().to_string() }
    })
}

pub fn read_file(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}

pub fn parse_instance(text: &str) -> Result<Instance, ScenarioError> {
    from_json(text)
}

pub fn load_instance(path: &Path) -> Result<Instance, ScenarioError> {
    parse_instance(&read_file(path)?)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instances always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONTENTION: &str = r#"{
        "slots": [{"id": "s1", "capacity": 1, "time_index": 0}, {"id": "s2", "capacity": 1, "time_index": 1}],
        "flights": [
            {"id": "f1", "airline": "A", "window": ["s1", "s2"], "costs": {"s1": 0, "s2": 10}},
            {"id": "f2", "airline": "B", "window": ["s1", "s2"], "costs": {"s1": 0, "s2": 4}}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let inst = parse_instance(CONTENTION).unwrap();
        assert_eq!(inst.flights.len(), 2);
        assert_eq!(inst.flights[0].cost(&"s2".into()), Some(10));
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn flights_may_be_omitted() {
        let inst = parse_instance(r#"{"slots": []}"#).unwrap();
        assert!(inst.flights.is_empty());
    }

    #[test]
    fn errors_name_the_field() {
        let bad = CONTENTION.replace("\"s2\": 4", "\"s2\": \"four\"");
        match parse_instance(&bad) {
            Err(ScenarioError::Parse { path, .. }) => assert_eq!(path, "flights[1].costs.s2"),
            other => panic!("{other:?}"),
        }
        let bad = CONTENTION.replacen("\"capacity\": 1", "\"capacity\": -1", 1);
        match parse_instance(&bad) {
            Err(ScenarioError::Parse { path, .. }) => assert_eq!(path, "slots[0].capacity"),
            other => panic!("{other:?}"),
        }
        let bad = CONTENTION.replacen("\"airline\": \"A\"", "\"airline\": \"A\", \"tail\": 3", 1);
        assert!(matches!(parse_instance(&bad), Err(ScenarioError::Parse { .. })));
    }
}
