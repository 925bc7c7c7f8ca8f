//! Machine-readable run reports: one JSON document per invocation on
//! stdout, carrying the command echo, the input digest, the numeric
//! results, and the wall time, so every number in a plot or log traces
//! back to a concrete run.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    /// The invocation's argument vector, echoed verbatim.
    pub command: Vec<String>,
    /// Hex SHA-256 of the raw input bytes; absent for commands that take
    /// no input file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    pub results: T,
    pub wall_time_seconds: f64,
}

impl<T: Serialize> RunReport<T> {
    pub fn emit(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
