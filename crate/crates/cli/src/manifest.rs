use std::collections::BTreeMap;

use rotovac_core::units::PhysicalConstants;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 of the constants as JSON.
    pub constants_hash: String,
    pub outputs: Vec<String>,
    pub timestamp: String,
    /// SHA-256 over command, inputs and constants hash.
    pub digest: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Flattens a serializable argument struct to `key → value` strings.
pub fn inputs_of<T: Serialize>(args: &T) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(args) {
        for (k, v) in map {
            let s = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            out.insert(k, s);
        }
    }
    out
}

impl RunManifest {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, consts: &PhysicalConstants, outputs: Vec<String>) -> Self {
        let constants_hash = sha256_hex(serde_json::to_string(consts).expect("constants serialize").as_bytes());
        let key = serde_json::json!({ "command": command, "inputs": inputs, "constants_hash": constants_hash });
        let digest = sha256_hex(key.to_string().as_bytes());
        Self {
            command: command.to_string(),
            inputs,
            constants_hash,
            outputs,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            digest,
        }
    }

    /// `#`-prefixed header lines for CSV output.
    pub fn comment_lines(&self) -> String {
        let inputs: Vec<String> = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "# rotovac {}\n# manifest_digest: {}\n# constants_sha256: {}\n# inputs: {}\n# outputs: {}\n# timestamp: {}\n",
            self.command,
            self.digest,
            self.constants_hash,
            inputs.join("; "),
            self.outputs.join(", "),
            self.timestamp
        )
    }
}
