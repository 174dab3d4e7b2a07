//! The reasoning substrate: an ID-addressable DOM tree mutated only through
//! atomic CRUD actions.
//!
//! [`DomState`] stores elements in an arena and keeps a hash map from
//! [`NodeId`] to arena slot, so every targeted action resolves its node
//! without walking the tree. All validation happens before the first write,
//! which makes a rejected action a no-op.

mod action;
mod serialize;
mod state;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub use action::Action;
pub use serialize::{serialize_tree, BOILERPLATE_HEAD, BOILERPLATE_TAIL};
pub use state::{ApplyError, ApplyReport, DocumentError, DomState, NodeRef};

/// Reserved id of the body container every document starts with.
pub const ROOT_ID: &str = "root";

/// Pseudo-attribute accepted by `Modify` to set an element's leading text.
pub const TEXT_ATTR: &str = "#text";

/// Tag used for anonymous text runs that follow an element child.
pub const TEXT_RUN_TAG: &str = "#text";

/// Identifier of an addressable element.
///
/// Non-empty, case-sensitive, without whitespace or angle brackets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeId(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid node id {0:?}: ids must be non-empty and contain no whitespace, quotes or angle brackets")]
pub struct InvalidNodeId(pub String);

impl NodeId {
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidNodeId> {
        let value = value.into();
        let ok = !value.is_empty()
            && !value
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '\'') || c.is_control());
        if ok {
            Ok(Self(value))
        } else {
            Err(InvalidNodeId(value))
        }
    }

    pub fn root() -> Self {
        Self(ROOT_ID.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0 == ROOT_ID
    }
}

impl TryFrom<String> for NodeId {
    type Error = InvalidNodeId;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl TryFrom<&str> for NodeId {
    type Error = InvalidNodeId;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<NodeId> for String {
    fn from(id: NodeId) -> Self {
        id.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Owned tree form of an element, as produced by the fragment parser and by
/// [`DomState::body_tree`].
///
/// `text` is the character data before the first child element. Text that
/// follows a child element is kept as an anonymous child with tag
/// [`TEXT_RUN_TAG`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomNode {
    pub id: Option<NodeId>,
    pub tag: String,
    pub attrs: IndexMap<String, String>,
    pub text: Option<String>,
    pub children: Vec<DomNode>,
}

impl DomNode {
    pub fn element(tag: impl Into<String>) -> Self {
        Self {
            id: None,
            tag: tag.into(),
            attrs: IndexMap::new(),
            text: None,
            children: Vec::new(),
        }
    }

    pub fn text_run(text: impl Into<String>) -> Self {
        Self {
            text: Some(text.into()),
            ..Self::element(TEXT_RUN_TAG)
        }
    }

    pub fn is_text_run(&self) -> bool {
        self.tag == TEXT_RUN_TAG
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).map(String::as_str)
    }

    /// Pre-order walk over this node and its descendants.
    pub fn walk(&self) -> impl Iterator<Item = &DomNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    /// Number of elements in this subtree, text runs excluded.
    pub fn element_count(&self) -> usize {
        self.walk().filter(|n| !n.is_text_run()).count()
    }

    /// Concatenated character data of this subtree in document order.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        fn collect(node: &DomNode, out: &mut String) {
            if let Some(text) = &node.text {
                out.push_str(text);
            }
            for child in &node.children {
                collect(child, out);
            }
        }
        collect(self, &mut out);
        out
    }
}

/// Collapses whitespace-only text to `None`; other text is kept verbatim.
pub(crate) fn normalize_text(text: Option<String>) -> Option<String> {
    text.filter(|t| !t.chars().all(char::is_whitespace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_id_rejects_whitespace_and_brackets() {
        assert!(NodeId::new("r1").is_ok());
        assert!(NodeId::new("main_svg").is_ok());
        assert!(NodeId::new("").is_err());
        assert!(NodeId::new("a b").is_err());
        assert!(NodeId::new("a<b").is_err());
        assert!(NodeId::new("a>").is_err());
        assert!(NodeId::new("tab\t").is_err());
    }

    #[test]
    fn node_id_is_case_sensitive() {
        assert_ne!(NodeId::new("R1").unwrap(), NodeId::new("r1").unwrap());
    }

    #[test]
    fn walk_is_preorder() {
        let mut root = DomNode::element("div");
        let mut a = DomNode::element("span");
        a.children.push(DomNode::element("strong"));
        root.children.push(a);
        root.children.push(DomNode::element("ul"));
        let tags: Vec<_> = root.walk().map(|n| n.tag.as_str()).collect();
        assert_eq!(tags, ["div", "span", "strong", "ul"]);
    }
}
