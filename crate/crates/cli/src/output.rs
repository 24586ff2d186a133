//! Run manifests and the two output formats.
//!
//! JSON output is one document with a `manifest` member. CSV output starts
//! with the manifest as a `# manifest: {...}` comment line, then a header
//! row and one row per record.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::{Command, Format, Global};

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: Value,
    pub started_unix: u64,
    pub finished_unix: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl Manifest {
    pub fn new(command: &'static str, global: &Global, cmd: &Command) -> Self {
        let args = serde_json::to_value(cmd).unwrap_or(Value::Null);
        let args = args.get(command).cloned().unwrap_or(args);
        Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed: global.seed,
            config: json!({ "global": global, "args": args }),
            started_unix: now(),
            finished_unix: 0,
        }
    }
}

/// A finished command: the JSON document and the CSV table.
pub struct Doc {
    pub manifest: Manifest,
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Doc {
    pub fn new(manifest: Manifest, json: Value) -> Self {
        Doc { manifest, json, header: vec![], rows: vec![] }
    }

    pub fn table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.header = header;
        self.rows = rows;
        self
    }
}

fn render(global: &Global, doc: &Doc) -> String {
    let mut manifest = doc.manifest.clone();
    manifest.finished_unix = now();
    match global.format {
        Format::Json => {
            let mut v = doc.json.clone();
            if let Value::Object(m) = &mut v {
                m.insert("manifest".into(), serde_json::to_value(&manifest).expect("manifest serializes"));
            }
            let mut s = serde_json::to_string_pretty(&v).expect("document serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = format!("# manifest: {}\n", serde_json::to_string(&manifest).expect("manifest serializes"));
            s.push_str(&doc.header.join(","));
            s.push('\n');
            for r in &doc.rows {
                s.push_str(&r.join(","));
                s.push('\n');
            }
            s
        }
    }
}

pub fn write(global: &Global, doc: &Doc) -> std::io::Result<()> {
    let text = render(global, doc);
    match &global.out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
