use std::collections::BTreeMap;

use serde::Serialize;

/// Everything that determines a report's bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_hash: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub strategy_hashes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    /// Caps as decimal strings, since some exceed 64 bits.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub caps: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Subcommand arguments other than files, seeds and caps.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, timestamp: Option<String>) -> Self {
        RunManifest {
            tool: "nestcast".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            model_hash: None,
            strategy_hashes: Vec::new(),
            seeds: Vec::new(),
            caps: BTreeMap::new(),
            mode: None,
            parameters: BTreeMap::new(),
            timestamp,
        }
    }

    pub fn cap(mut self, name: &str, value: impl ToString) -> Self {
        self.caps.insert(name.into(), value.to_string());
        self
    }

    pub fn param(mut self, name: &str, value: impl ToString) -> Self {
        self.parameters.insert(name.into(), value.to_string());
        self
    }

    /// `key: value` lines, in field order.
    pub fn text_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("tool: {} {}", self.tool, self.version),
            format!("subcommand: {}", self.subcommand),
        ];
        if let Some(h) = &self.model_hash {
            out.push(format!("model: {h}"));
        }
        if !self.strategy_hashes.is_empty() {
            out.push(format!("strategies: {}", self.strategy_hashes.join(" ")));
        }
        if !self.seeds.is_empty() {
            let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
            out.push(format!("seeds: {}", seeds.join(" ")));
        }
        for (k, v) in &self.caps {
            out.push(format!("cap {k}: {v}"));
        }
        if let Some(m) = &self.mode {
            out.push(format!("mode: {m}"));
        }
        for (k, v) in &self.parameters {
            out.push(format!("{k}: {v}"));
        }
        if let Some(t) = &self.timestamp {
            out.push(format!("timestamp: {t}"));
        }
        out
    }
}
