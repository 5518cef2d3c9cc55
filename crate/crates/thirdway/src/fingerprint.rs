use std::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Content hash standing in for a data file in published results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub algorithm: String,
    pub digest: String,
}

impl Fingerprint {
    pub const ALGORITHM: &'static str = "sha256";

    pub fn of_bytes(bytes: &[u8]) -> Self {
        let hash = Sha256::digest(bytes);
        let mut digest = String::with_capacity(64);
        for b in hash.iter() {
            write!(digest, "{b:02x}").unwrap();
        }
        Fingerprint { algorithm: Self::ALGORITHM.to_string(), digest }
    }
}

impl std::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.algorithm, self.digest)
    }
}
