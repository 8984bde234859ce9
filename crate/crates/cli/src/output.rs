//! Output directories, manifests and the thread setting.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

/// `MKG_THREADS` as requested. Every computation runs on the calling thread,
/// so the value is validated and recorded but never raises parallelism.
pub fn requested_threads() -> Option<usize> {
    let raw = std::env::var("MKG_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            log::warn!("ignoring MKG_THREADS={raw:?}: expected a positive integer");
            None
        }
    }
}

/// Writes `manifest.json` next to the listed files.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    config: &impl Serialize,
    status: &str,
    files: &[String],
    warnings: &[String],
    extra: Value,
) -> Result<(), CliError> {
    let mut m = json!({
        "tool": "mkg",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "status": status,
        "config": config,
        "files": files,
        "warnings": warnings,
        "threads": { "requested": requested_threads(), "used": 1 },
    });
    if let (Some(obj), Value::Object(more)) = (m.as_object_mut(), extra) {
        obj.extend(more);
    }
    std::fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}
