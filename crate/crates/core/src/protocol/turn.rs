use serde::{Deserialize, Serialize};

use super::ProtocolError;

const TAGS: [&str; 3] = ["think", "tool_call", "answer"];

/// The tagged regions of one solver response, in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Turn {
    pub thoughts: Vec<String>,
    pub tool_calls: Vec<String>,
    /// Every answer region; only the first one terminates the episode.
    pub answers: Vec<String>,
}

impl Turn {
    pub fn answer(&self) -> Option<&str> {
        self.answers.first().map(String::as_str)
    }
}

/// Finds the earliest opening tag at or after `from`.
fn next_open(text: &str, from: usize) -> Option<(usize, &'static str)> {
    let mut at = from;
    while let Some(rel) = text[at..].find('<') {
        let start = at + rel;
        let rest = &text[start + 1..];
        for tag in TAGS {
            if rest.starts_with(tag) && rest[tag.len()..].starts_with('>') {
                return Some((start, tag));
            }
        }
        at = start + 1;
    }
    None
}

/// Splits raw model output into thoughts, tool calls and answers.
///
/// Text outside the three envelopes is ignored. Region bodies are kept
/// verbatim.
pub fn parse_turn(text: &str) -> Result<Turn, ProtocolError> {
    let mut turn = Turn::default();
    let mut pos = 0;
    while let Some((start, tag)) = next_open(text, pos) {
        let body_start = start + tag.len() + 2;
        let close = format!("</{tag}>");
        let Some(len) = text[body_start..].find(&close) else {
            return Err(ProtocolError::UnclosedTag { tag, offset: start });
        };
        let body = &text[body_start..body_start + len];
        if let Some((inner_at, inner)) = next_open(body, 0) {
            return Err(ProtocolError::NestedTag {
                outer: tag,
                inner,
                offset: body_start + inner_at,
            });
        }
        let bucket = match tag {
            "think" => &mut turn.thoughts,
            "tool_call" => &mut turn.tool_calls,
            _ => &mut turn.answers,
        };
        bucket.push(body.to_owned());
        pos = body_start + len + close.len();
    }
    if turn.tool_calls.is_empty() && turn.answers.is_empty() {
        return Err(ProtocolError::EmptyTurn);
    }
    Ok(turn)
}
