use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::FlatteningReport;
use crate::tensor::ScalarMode;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Exploratory run; nothing is claimed.
    Evidence,
}

/// Record of one verification or search run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub run_id: String,
    pub kind: String,
    pub seed: u64,
    pub scalar: ScalarMode,
    pub params: BTreeMap<String, Value>,
    pub graph: Option<String>,
    pub construction: Option<String>,
    pub flattenings: Vec<FlatteningReport>,
    pub derived: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Stable identifier derived from the run kind, parameters, seed and
/// scalar mode.
pub fn run_id(
    kind: &str,
    params: &BTreeMap<String, Value>,
    seed: u64,
    scalar: ScalarMode,
) -> String {
    let key = serde_json::json!({
        "kind": kind,
        "params": params,
        "seed": seed,
        "scalar": scalar,
    });
    let digest = Sha256::digest(key.to_string().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(kind: &str, params: BTreeMap<String, Value>, seed: u64, scalar: ScalarMode) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            run_id: run_id(kind, &params, seed, scalar),
            kind: kind.to_string(),
            seed,
            scalar,
            params,
            graph: None,
            construction: None,
            flattenings: Vec::new(),
            derived: BTreeMap::new(),
            verdict: Verdict::Evidence,
            notes: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn derive(&mut self, key: &str, value: impl Serialize) {
        self.derived.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable value"),
        );
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Every flattening within its dimension and min-cut bounds.
    pub fn bounds_hold(&self) -> bool {
        self.flattenings.iter().all(|f| f.within_bounds())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parameter map from `(name, value)` pairs.
pub(crate) fn params<const N: usize>(items: [(&str, Value); N]) -> BTreeMap<String, Value> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn run_id_is_stable_and_sensitive() {
        let p = params([("N", json!(4))]);
        let a = run_id("thm16", &p, 0, ScalarMode::Rational);
        assert_eq!(a, run_id("thm16", &p, 0, ScalarMode::Rational));
        assert_eq!(a.len(), 16);
        assert_ne!(a, run_id("thm16", &p, 1, ScalarMode::Rational));
        assert_ne!(a, run_id("thm16", &p, 0, ScalarMode::prime()));
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("x", params([("k", json!(2))]), 3, ScalarMode::prime());
        r.derive("rank", 16);
        r.verdict = Verdict::Pass;
        let s = r.to_json();
        assert!(s.contains("\"PASS\""));
        assert!(s.contains("2147483647"));
        assert!(!s.contains("timing_ms"));
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
