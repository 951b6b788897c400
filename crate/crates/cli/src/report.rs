use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Envelope around every JSON result. Nothing in it depends on the clock
/// unless timing was requested, so reruns are byte identical.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
