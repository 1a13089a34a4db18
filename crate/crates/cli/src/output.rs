//! Output plumbing: deterministic metadata headers and file/stdout sinks.
//!
//! Every TSV artifact starts with a single `#`-prefixed line of JSON
//! metadata identifying the tool version, the subcommand, the seed, and
//! a short hash of the run configuration, so results remain
//! attributable after they are copied around.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// First 16 hex characters of the SHA-256 of the canonical parameter
/// encoding; identifies a run configuration independently of the seed.
pub fn config_hash(params: &Value) -> String {
    let digest = Sha256::digest(params.to_string().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// The `#`-prefixed JSON header line. Thread count is deliberately
/// excluded: reruns at any parallelism must stay byte-identical.
pub fn metadata_line(
    command: &str,
    seed: Option<u64>,
    params: Value,
    extra: &[(&str, Value)],
) -> String {
    let mut obj = json!({
        "tool": "graphtest",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "config": config_hash(&params),
        "params": params,
    });
    let map = obj.as_object_mut().unwrap();
    for (key, value) in extra {
        map.insert((*key).to_string(), value.clone());
    }
    format!("# {obj}\n")
}

/// Write `content` to the given path, or to stdout when absent.
pub fn write_output(out: Option<&Path>, content: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
