//! Prompt texts sent to the solver.

use serde_json::{json, Value};

pub const SYSTEM_PROMPT: &str = include_str!("../../resources/system_prompt.md");
pub const CRITIQUE_PROMPT: &str = include_str!("../../resources/critique_prompt.md");
pub const USER_SVG_PROMPT: &str = include_str!("../../resources/user_prompt.md");

pub const TOOLS_PLACEHOLDER: &str = "{provided_tools}";
pub const SVG_CODE_PLACEHOLDER: &str = "{current_svg_code}";
/// Placeholder in the first line of [`CRITIQUE_PROMPT`] for the tool names.
pub const TOOL_NAME_PLACEHOLDER: &str = "{}";

/// Function-calling schemas for the five notebook tools.
pub fn tool_schemas() -> Value {
    let id = |desc: &str| json!({ "type": "string", "description": desc });
    let nullable_id = |desc: &str| json!({ "type": ["string", "null"], "description": desc });
    let fragment = json!({ "type": "string", "description": "HTML or SVG markup; every top-level element needs a unique id." });
    let tool = |name: &str, desc: &str, properties: Value, required: &[&str]| {
        json!({
            "type": "function",
            "function": {
                "name": name,
                "description": desc,
                "parameters": { "type": "object", "properties": properties, "required": required }
            }
        })
    };
    json!([
        tool(
            "insert_element",
            "Insert a new element into the notebook.",
            json!({
                "rootId": nullable_id("Parent element id; defaults to the notebook root."),
                "beforeId": nullable_id("Sibling to insert before; appends when null."),
                "fragment": fragment.clone(),
            }),
            &["fragment"],
        ),
        tool(
            "modify_element",
            "Change attributes of an existing element in place. A null value removes the attribute.",
            json!({
                "targetId": id("Element to modify."),
                "attrs": { "type": "object", "additionalProperties": { "type": ["string", "null"] } },
            }),
            &["targetId", "attrs"],
        ),
        tool(
            "replace_element",
            "Replace an element and its subtree with new markup at the same position.",
            json!({ "targetId": id("Element to replace."), "fragment": fragment }),
            &["targetId", "fragment"],
        ),
        tool(
            "remove_element",
            "Remove an element and its subtree.",
            json!({ "targetId": id("Element to remove.") }),
            &["targetId"],
        ),
        tool("clear", "Remove all content from the notebook.", json!({}), &[]),
    ])
}

/// System prompt with the tool schemas filled in.
pub fn system_prompt() -> String {
    SYSTEM_PROMPT.replace(TOOLS_PLACEHOLDER, &tool_schemas().to_string())
}

/// `(header, body)` of the critique prompt: the action-result line and the
/// review task that follows it.
pub fn critique_parts() -> (&'static str, &'static str) {
    CRITIQUE_PROMPT.split_once('\n').unwrap_or((CRITIQUE_PROMPT, ""))
}
