use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::protocol::{ActionRecord, CritiqueReport, TokenCount, Turn};
use crate::render::RenderOptions;

/// One solver turn and everything that followed from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrajectoryStep {
    pub index: usize,
    pub context_digest: String,
    /// Raw solver output.
    pub response: String,
    /// `None` when the response did not parse.
    pub turn: Option<Turn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol_error: Option<String>,
    pub actions: Vec<ActionRecord>,
    /// Canonical document after the turn.
    pub state_snapshot: String,
    /// SHA-256 of the PNG rendered from the snapshot.
    pub render_digest: String,
    pub critique: Option<CritiqueReport>,
    pub tokens_in: TokenCount,
    pub tokens_out: TokenCount,
    /// Task setup applied before the first turn; only on step 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub setup: Vec<ActionRecord>,
    pub render_options: RenderOptions,
}

#[derive(Debug, thiserror::Error)]
pub enum TrajectoryError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_jsonl<W: Write>(steps: &[TrajectoryStep], mut out: W) -> io::Result<()> {
    for step in steps {
        serde_json::to_writer(&mut out, step)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Reads one step per non-blank line.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<TrajectoryStep>, TrajectoryError> {
    let mut steps = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let step = serde_json::from_str(&line).map_err(|source| TrajectoryError::Json { line: i + 1, source })?;
        steps.push(step);
    }
    Ok(steps)
}

/// Recorded responses keyed by context digest.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cassette {
    pub entries: BTreeMap<String, String>,
}

impl Cassette {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("string map serializes");
        s.push('\n');
        s
    }

    /// Builds a cassette from a logged trajectory.
    pub fn from_trajectory(steps: &[TrajectoryStep]) -> Self {
        Self {
            entries: steps
                .iter()
                .map(|s| (s.context_digest.clone(), s.response.clone()))
                .collect(),
        }
    }
}
