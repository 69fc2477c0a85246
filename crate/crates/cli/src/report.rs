//! Report envelope and output.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::{Failure, RunConfig};

/// Result of a subcommand: `passed` selects exit code 0 or 2.
pub struct Outcome {
    pub passed: bool,
    pub result: Value,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Outcome { passed: true, result }
    }

    pub fn check(passed: bool, result: Value) -> Self {
        Outcome { passed, result }
    }
}

pub fn envelope(command: &str, config: Option<&RunConfig>, result: &Result<Outcome, Failure>) -> Value {
    let mut doc = json!({
        "tool": "ncreal",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    });
    match result {
        Ok(o) => {
            doc["status"] = json!(if o.passed { "pass" } else { "fail" });
            doc["result"] = o.result.clone();
        }
        Err(f) => {
            doc["status"] = json!("error");
            doc["error"] = json!({ "kind": f.kind(), "message": f.message() });
        }
    }
    doc
}

/// Pretty JSON on stdout, or an atomic replace of `out`.
pub fn emit(doc: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(std::io::Error::other)?;
    text.push('\n');
    match out {
        None => std::io::stdout().lock().write_all(text.as_bytes()),
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
