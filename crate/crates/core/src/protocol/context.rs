use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::critique::CritiqueReport;
use super::prompts::{self, SVG_CODE_PLACEHOLDER, TOOL_NAME_PLACEHOLDER};
use crate::dom::{Action, DomState};
use crate::render::{ImageError, RasterImage};
use crate::sha256_hex;

/// Outcome of one tool call, as remembered across turns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActionRecord {
    /// Substrate revision after the call was processed.
    pub revision: u64,
    /// `None` when the payload did not decode.
    pub action: Option<Action>,
    pub payload: String,
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    /// Step that issued the call; `None` for task setup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

impl ActionRecord {
    fn tool_label(&self) -> &str {
        self.action.as_ref().map_or("invalid_call", Action::tool_name)
    }

    fn history_line(&self) -> String {
        let call = self.action.as_ref().map_or_else(|| self.payload.trim().to_owned(), Action::encode);
        match (&self.diagnostic, self.accepted) {
            (_, true) => format!("[accepted, revision {}] {call}", self.revision),
            (Some(d), false) => format!("[rejected: {d}] {call}"),
            (None, false) => format!("[rejected] {call}"),
        }
    }
}

/// Which user prompt frames the task.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStyle {
    /// The instruction followed by the notebook source.
    #[default]
    Plain,
    /// The SVG revision prompt with the notebook source filled in.
    SvgRevision,
}

/// Everything the solver sees at one step. Thought traces have no field
/// here, so they cannot leak into a later turn.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub step: usize,
    pub instruction: String,
    pub style: PromptStyle,
    pub original_image: Option<RasterImage>,
    pub action_history: Vec<ActionRecord>,
    /// Canonical body serialization of the current state.
    pub document: String,
    pub state_image: RasterImage,
    pub critique: Option<CritiqueReport>,
    /// Why the previous turn could not be parsed, if it could not.
    pub protocol_error: Option<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn build_context(
    step: usize,
    instruction: &str,
    style: PromptStyle,
    original_image: Option<&RasterImage>,
    action_history: &[ActionRecord],
    state: &DomState,
    state_image: &RasterImage,
    critique: Option<&CritiqueReport>,
    protocol_error: Option<&str>,
) -> Context {
    Context {
        step,
        instruction: instruction.to_owned(),
        style,
        original_image: original_image.cloned(),
        action_history: action_history.to_vec(),
        document: state.serialize_body(),
        state_image: state_image.clone(),
        critique: critique.cloned(),
        protocol_error: protocol_error.map(str::to_owned),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub label: String,
    pub png: Vec<u8>,
}

/// Flat prompt text plus PNG attachments, ready for a chat endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedContext {
    pub system: String,
    pub user: String,
    pub images: Vec<Attachment>,
    /// SHA-256 over the texts and the attachment hashes.
    pub digest: String,
}

impl RenderedContext {
    pub fn new(system: String, user: String, images: Vec<Attachment>) -> Self {
        let manifest = json!({
            "system": system,
            "user": user,
            "images": images
                .iter()
                .map(|a| json!({ "label": a.label, "sha256": sha256_hex(&a.png) }))
                .collect::<Vec<_>>(),
        });
        let digest = sha256_hex(manifest.to_string());
        Self {
            system,
            user,
            images,
            digest,
        }
    }

    /// All prompt text, for token accounting.
    pub fn text(&self) -> String {
        format!("{}\n\n{}", self.system, self.user)
    }
}

impl Context {
    /// Records issued by the previous step.
    fn last_results(&self) -> Vec<ActionRecord> {
        let Some(prev) = self.step.checked_sub(1) else {
            return Vec::new();
        };
        self.action_history
            .iter()
            .filter(|r| r.step == Some(prev))
            .cloned()
            .collect()
    }

    pub fn user_text(&self) -> String {
        let mut out = String::new();
        match self.style {
            PromptStyle::Plain => {
                out.push_str(self.instruction.trim_end());
                out.push_str("\n\n# Current Notebook #\n\n```html\n");
                out.push_str(&self.document);
                out.push_str("```\n");
            }
            PromptStyle::SvgRevision => {
                if !self.instruction.trim().is_empty() {
                    out.push_str(self.instruction.trim_end());
                    out.push_str("\n\n");
                }
                out.push_str(&prompts::USER_SVG_PROMPT.replace(SVG_CODE_PLACEHOLDER, self.document.trim_end()));
            }
        }
        out.push_str("\n# Action History #\n\n");
        if self.action_history.is_empty() {
            out.push_str("(none)\n");
        }
        for (i, record) in self.action_history.iter().enumerate() {
            let _ = writeln!(out, "{}. {}", i + 1, record.history_line());
        }
        if self.step > 0 {
            out.push('\n');
            out.push_str(&format_tool_response(
                &self.last_results(),
                self.critique.as_ref(),
                self.protocol_error.as_deref(),
            ));
        }
        out
    }

    pub fn render(&self) -> Result<RenderedContext, ImageError> {
        let mut images = Vec::new();
        if let Some(orig) = &self.original_image {
            images.push(Attachment {
                label: "original".into(),
                png: orig.to_png()?,
            });
        }
        images.push(Attachment {
            label: "state".into(),
            png: self.state_image.to_png()?,
        });
        Ok(RenderedContext::new(prompts::system_prompt(), self.user_text(), images))
    }
}

/// The `<tool_response>` envelope reporting a turn's tool calls, any protocol
/// error and the critique.
pub fn format_tool_response(
    results: &[ActionRecord],
    critique: Option<&CritiqueReport>,
    protocol_error: Option<&str>,
) -> String {
    let mut names: Vec<&str> = Vec::new();
    for r in results {
        let label = r.tool_label();
        if !names.contains(&label) {
            names.push(label);
        }
    }
    let names = if names.is_empty() { "none".to_owned() } else { names.join(", ") };
    let (header, body) = prompts::critique_parts();

    let mut out = String::from("<tool_response>\n");
    out.push_str(&header.replacen(TOOL_NAME_PLACEHOLDER, &names, 1));
    out.push('\n');
    for r in results {
        let _ = match (&r.diagnostic, r.accepted) {
            (_, true) => writeln!(out, "- {}: accepted (revision {})", r.tool_label(), r.revision),
            (Some(d), false) => writeln!(out, "- {}: rejected ({d})", r.tool_label()),
            (None, false) => writeln!(out, "- {}: rejected", r.tool_label()),
        };
    }
    if let Some(e) = protocol_error {
        let _ = writeln!(out, "[Protocol Error] {e}");
    }
    if let Some(c) = critique {
        let report = serde_json::to_string(c).expect("critique serializes");
        let _ = writeln!(out, "[Critique Report] {report}");
    }
    out.push_str(body.trim_end());
    out.push_str("\n</tool_response>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{CritiqueIssue, IssueCategory};
    use crate::render::{render, RenderOptions};

    fn accepted_insert() -> ActionRecord {
        ActionRecord {
            revision: 1,
            action: Some(Action::insert("<div id='analysis'>x</div>", Some("root"))),
            payload: String::new(),
            accepted: true,
            diagnostic: None,
            step: Some(0),
        }
    }

    #[test]
    fn accepted_insert_response() {
        let r = format_tool_response(&[accepted_insert()], None, None);
        assert!(r.starts_with("<tool_response>"));
        assert!(r.contains("[Action Result]"));
        assert!(r.contains("result of tool_call insert_element."));
        assert!(r.contains("[Critique Task]"));
        assert!(r.ends_with("</tool_response>"));
    }

    #[test]
    fn rejected_response_carries_diagnostic() {
        let rec = ActionRecord {
            revision: 0,
            action: Some(Action::delete("ghost")),
            payload: String::new(),
            accepted: false,
            diagnostic: Some("UnknownTarget: unknown target id \"ghost\"".into()),
            step: Some(0),
        };
        let r = format_tool_response(std::slice::from_ref(&rec), None, None);
        assert!(r.contains("remove_element: rejected (UnknownTarget: unknown target id \"ghost\")"));
    }

    #[test]
    fn response_is_bit_stable() {
        let critique = CritiqueReport::from_issues(vec![CritiqueIssue {
            category: IssueCategory::AttributeError,
            description: "bar too dark".into(),
            target_ids: vec![],
        }]);
        let a = format_tool_response(&[accepted_insert()], Some(&critique), Some("EmptyTurn"));
        let b = format_tool_response(&[accepted_insert()], Some(&critique), Some("EmptyTurn"));
        assert_eq!(a, b);
        assert!(a.contains("[Critique Report] {\"hallucinationDetected\":true"));
        assert!(a.contains("[Protocol Error] EmptyTurn"));
    }

    #[test]
    fn step_zero_and_after_insert() {
        let mut state = DomState::new();
        let img = render(&state, &RenderOptions::default()).unwrap();
        let ctx = build_context(0, "Draw a bar.", PromptStyle::Plain, None, &[], &state, &img, None, None);
        assert!(ctx.action_history.is_empty());
        let r0 = ctx.render().unwrap();
        assert!(!r0.user.contains("<tool_response>"));
        assert_eq!(r0.images.len(), 1);

        let rec = accepted_insert();
        state.apply(rec.action.as_ref().unwrap()).unwrap();
        let img1 = render(&state, &RenderOptions::default()).unwrap();
        let ctx1 = build_context(1, "Draw a bar.", PromptStyle::Plain, Some(&img), &[rec], &state, &img1, None, None);
        let r1 = ctx1.render().unwrap();
        assert_eq!(ctx1.action_history.len(), 1);
        assert!(r1.user.contains("<div id=\"analysis\">x</div>"));
        assert!(r1.user.contains("<tool_response>"));
        assert_eq!(r1.images.len(), 2);
        assert_eq!(r1.images[1].png, img1.to_png().unwrap());
        assert_ne!(r0.digest, r1.digest);
        assert_eq!(r1.digest, ctx1.render().unwrap().digest);
    }

    #[test]
    fn svg_style_embeds_document() {
        let mut state = DomState::new();
        state.apply(&Action::insert("<svg id='main_svg' width='10' height='10'></svg>", None)).unwrap();
        let img = render(&state, &RenderOptions::default()).unwrap();
        let ctx = build_context(0, "", PromptStyle::SvgRevision, None, &[], &state, &img, None, None);
        let user = ctx.user_text();
        assert!(user.starts_with("You are an SVG code specialist."));
        assert!(user.contains("CURRENT SVG CODE:\n\n<svg id=\"main_svg\""));
        assert!(!user.contains(SVG_CODE_PLACEHOLDER));
    }
}
