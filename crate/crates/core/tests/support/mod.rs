//! Checks shared by the integration tests and the acceptance target.
#![allow(dead_code)]

pub mod bar_chart;
pub mod corpus;
pub mod episodes;
pub mod golden;
pub mod oracle;
pub mod trees;
pub mod workload;

use std::path::PathBuf;

/// Repository root, found from this file's location.
pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .find(|p| p.join("fixtures").is_dir())
        .expect("fixtures directory above the crate")
        .to_path_buf()
}
