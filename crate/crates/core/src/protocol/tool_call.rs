use indexmap::IndexMap;
use serde_json::{Map, Value};

use super::ProtocolError;
use crate::dom::{Action, NodeId};

/// Decodes one `<tool_call>` body.
pub fn decode_tool_call(payload: &str) -> Result<Action, ProtocolError> {
    let value: Value =
        serde_json::from_str(payload.trim()).map_err(|e| ProtocolError::MalformedPayload(e.to_string()))?;
    decode_tool_value(&value)
}

/// Maps a `{"name", "arguments"}` object onto an [`Action`].
///
/// `arguments` may also be a JSON string holding the object, as some
/// chat-completion backends emit it that way.
pub fn decode_tool_value(value: &Value) -> Result<Action, ProtocolError> {
    let obj = value
        .as_object()
        .ok_or_else(|| ProtocolError::MalformedPayload("tool call must be a JSON object".into()))?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| ProtocolError::MalformedPayload("missing string field \"name\"".into()))?;
    let parsed;
    let args: &Map<String, Value> = match obj.get("arguments") {
        None | Some(Value::Null) => {
            parsed = Map::new();
            &parsed
        }
        Some(Value::Object(m)) => m,
        Some(Value::String(s)) => {
            parsed = match serde_json::from_str::<Value>(s) {
                Ok(Value::Object(m)) => m,
                _ => return Err(bad(name, "arguments string is not a JSON object")),
            };
            &parsed
        }
        Some(_) => return Err(bad(name, "arguments must be an object")),
    };
    let a = Args { tool: name, args };
    match name {
        "insert_element" => Ok(Action::Insert {
            fragment: a.required_str("fragment")?.to_owned(),
            root_id: a.optional_id("rootId")?,
            before_id: a.optional_id("beforeId")?,
        }),
        "modify_element" => Ok(Action::Modify {
            target_id: a.required_id("targetId")?,
            attrs: a.attrs()?,
        }),
        "replace_element" => Ok(Action::Replace {
            target_id: a.required_id("targetId")?,
            fragment: a.required_str("fragment")?.to_owned(),
        }),
        "remove_element" => Ok(Action::Delete {
            target_id: a.required_id("targetId")?,
        }),
        "clear" => Ok(Action::Clear),
        other => Err(ProtocolError::UnknownTool(other.to_owned())),
    }
}

fn bad(tool: &str, message: impl Into<String>) -> ProtocolError {
    ProtocolError::BadArguments {
        tool: tool.to_owned(),
        message: message.into(),
    }
}

struct Args<'a> {
    tool: &'a str,
    args: &'a Map<String, Value>,
}

impl Args<'_> {
    fn required_str(&self, key: &str) -> Result<&str, ProtocolError> {
        match self.args.get(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(bad(self.tool, format!("{key} must be a string"))),
            None => Err(bad(self.tool, format!("missing required argument {key}"))),
        }
    }

    fn required_id(&self, key: &str) -> Result<NodeId, ProtocolError> {
        NodeId::new(self.required_str(key)?).map_err(|e| bad(self.tool, e.to_string()))
    }

    fn optional_id(&self, key: &str) -> Result<Option<NodeId>, ProtocolError> {
        match self.args.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => NodeId::new(s.as_str())
                .map(Some)
                .map_err(|e| bad(self.tool, e.to_string())),
            Some(_) => Err(bad(self.tool, format!("{key} must be a string or null"))),
        }
    }

    fn attrs(&self) -> Result<IndexMap<String, Option<String>>, ProtocolError> {
        let Some(Value::Object(map)) = self.args.get("attrs") else {
            return Err(bad(self.tool, "attrs must be an object"));
        };
        map.iter()
            .map(|(k, v)| {
                let v = match v {
                    Value::Null => None,
                    Value::String(s) => Some(s.clone()),
                    Value::Number(n) => Some(n.to_string()),
                    Value::Bool(b) => Some(b.to_string()),
                    _ => return Err(bad(self.tool, format!("value of attribute {k} must be a scalar"))),
                };
                Ok((k.clone(), v))
            })
            .collect()
    }
}
