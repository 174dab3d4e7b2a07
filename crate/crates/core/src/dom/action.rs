use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use super::NodeId;

/// One atomic transition of the substrate.
///
/// Serializes to the tool-call object the solver emits, e.g.
/// `{"name":"remove_element","arguments":{"targetId":"r1"}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    /// Mount a parsed fragment under `root_id` (the body container when
    /// absent), before `before_id` or as the last child.
    Insert {
        fragment: String,
        root_id: Option<NodeId>,
        before_id: Option<NodeId>,
    },
    /// Overwrite attributes in place; a `None` value removes the attribute.
    Modify {
        target_id: NodeId,
        attrs: IndexMap<String, Option<String>>,
    },
    /// Swap the target subtree for a parsed fragment at the same sibling index.
    Replace { target_id: NodeId, fragment: String },
    /// Remove the target and all its descendants.
    Delete { target_id: NodeId },
    /// Empty the body container.
    Clear,
}

impl Action {
    pub fn tool_name(&self) -> &'static str {
        match self {
            Action::Insert { .. } => "insert_element",
            Action::Modify { .. } => "modify_element",
            Action::Replace { .. } => "replace_element",
            Action::Delete { .. } => "remove_element",
            Action::Clear => "clear",
        }
    }

    pub fn target(&self) -> Option<&NodeId> {
        match self {
            Action::Modify { target_id, .. }
            | Action::Replace { target_id, .. }
            | Action::Delete { target_id } => Some(target_id),
            Action::Insert { .. } | Action::Clear => None,
        }
    }

    pub fn insert(fragment: impl Into<String>, root_id: Option<&str>) -> Self {
        Action::Insert {
            fragment: fragment.into(),
            root_id: root_id.map(|r| NodeId::new(r).expect("valid root id")),
            before_id: None,
        }
    }

    pub fn modify<'a>(target: &str, attrs: impl IntoIterator<Item = (&'a str, Option<&'a str>)>) -> Self {
        Action::Modify {
            target_id: NodeId::new(target).expect("valid target id"),
            attrs: attrs
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v.map(str::to_owned)))
                .collect(),
        }
    }

    pub fn replace(target: &str, fragment: impl Into<String>) -> Self {
        Action::Replace {
            target_id: NodeId::new(target).expect("valid target id"),
            fragment: fragment.into(),
        }
    }

    pub fn delete(target: &str) -> Self {
        Action::Delete {
            target_id: NodeId::new(target).expect("valid target id"),
        }
    }

    /// Tool-call JSON object for this action.
    pub fn to_tool_call(&self) -> Value {
        let arguments = match self {
            Action::Insert {
                fragment,
                root_id,
                before_id,
            } => {
                let mut args = Map::new();
                if let Some(root) = root_id {
                    args.insert("rootId".into(), json!(root.as_str()));
                }
                if let Some(before) = before_id {
                    args.insert("beforeId".into(), json!(before.as_str()));
                }
                args.insert("fragment".into(), json!(fragment));
                Value::Object(args)
            }
            Action::Modify { target_id, attrs } => {
                let attrs: Map<String, Value> = attrs
                    .iter()
                    .map(|(k, v)| (k.clone(), v.as_ref().map_or(Value::Null, |v| json!(v))))
                    .collect();
                json!({ "targetId": target_id.as_str(), "attrs": attrs })
            }
            Action::Replace { target_id, fragment } => {
                json!({ "targetId": target_id.as_str(), "fragment": fragment })
            }
            Action::Delete { target_id } => json!({ "targetId": target_id.as_str() }),
            Action::Clear => json!({}),
        };
        json!({ "name": self.tool_name(), "arguments": arguments })
    }

    /// Compact JSON text of [`Action::to_tool_call`].
    pub fn encode(&self) -> String {
        self.to_tool_call().to_string()
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_tool_call().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        crate::protocol::decode_tool_value(&value).map_err(serde::de::Error::custom)
    }
}
