//! Core of the slate agent: a DOM substrate edited through atomic actions,
//! a strict fragment parser, a deterministic renderer, the agent protocol and
//! the episode orchestrator.

pub mod agent;
pub mod dom;
pub mod parser;
pub mod protocol;
pub mod render;
pub mod workload;

use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}
