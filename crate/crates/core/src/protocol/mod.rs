//! Wire protocol between the orchestrator and its agents: tag envelopes,
//! tool-call JSON, tool responses, prompt contexts and token accounting.

mod context;
mod critique;
pub mod prompts;
mod tokens;
mod tool_call;
mod turn;

pub use context::{build_context, format_tool_response, ActionRecord, Attachment, Context, PromptStyle, RenderedContext};
pub use critique::{CritiqueIssue, CritiqueReport, IssueCategory};
pub use tokens::{count_tokens, TokenCount, TokenCounter, WhitespaceCounter, WordPunctCounter};
pub use tool_call::{decode_tool_call, decode_tool_value};
pub use turn::{parse_turn, Turn};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("<{tag}> opened at byte {offset} is never closed")]
    UnclosedTag { tag: &'static str, offset: usize },
    #[error("<{inner}> at byte {offset} is nested inside <{outer}>")]
    NestedTag {
        outer: &'static str,
        inner: &'static str,
        offset: usize,
    },
    #[error("turn contains neither a tool call nor an answer")]
    EmptyTurn,
    #[error("unknown tool {0:?}")]
    UnknownTool(String),
    #[error("bad arguments for {tool}: {message}")]
    BadArguments { tool: String, message: String },
    #[error("malformed tool-call payload: {0}")]
    MalformedPayload(String),
}

impl ProtocolError {
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolError::UnclosedTag { .. } => "UnclosedTag",
            ProtocolError::NestedTag { .. } => "NestedTag",
            ProtocolError::EmptyTurn => "EmptyTurn",
            ProtocolError::UnknownTool(_) => "UnknownTool",
            ProtocolError::BadArguments { .. } => "BadArguments",
            ProtocolError::MalformedPayload(_) => "MalformedPayload",
        }
    }
}
