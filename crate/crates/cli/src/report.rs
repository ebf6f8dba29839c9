use serde_json::{json, Value};

use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A check inside the run did not hold.
    Failed,
    Falsified,
}

/// One report in all three renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub manifest: RunManifest,
    pub status: Status,
    pub text: Vec<String>,
    /// Header first.
    pub csv: Vec<String>,
    pub body: Value,
    /// Replaces every rendering when set (model files).
    pub raw: Option<String>,
}

impl Report {
    pub fn new(manifest: RunManifest) -> Self {
        Report { manifest, status: Status::Ok, text: Vec::new(), csv: Vec::new(), body: Value::Null, raw: None }
    }

    pub fn render(&self, format: Format) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut out = String::new();
        match format {
            Format::Text => {
                for line in self.manifest.text_lines() {
                    out.push_str("# ");
                    out.push_str(&line);
                    out.push('\n');
                }
                for line in &self.text {
                    out.push_str(line);
                    out.push('\n');
                }
            }
            Format::Csv => {
                let manifest = serde_json::to_string(&self.manifest).expect("manifest serializes");
                out.push_str(&format!("# manifest: {manifest}\n"));
                for line in &self.csv {
                    out.push_str(line);
                    out.push('\n');
                }
            }
            Format::Structured => {
                let doc = json!({ "manifest": self.manifest, "report": self.body });
                out = serde_json::to_string_pretty(&doc).expect("report serializes");
                out.push('\n');
            }
        }
        out
    }
}
