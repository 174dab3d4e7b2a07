//! Canonical text form of a document.
//!
//! Attributes keep insertion order (id first), values use double quotes,
//! newlines are LF. Element-only content is indented by two spaces per level;
//! an element holding any character data is written inline so the text
//! survives a re-parse unchanged.

use std::fmt::Write;

use super::{DomNode, DomState, NodeRef};

pub const BOILERPLATE_HEAD: &str =
    "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n</head>\n<body>\n";
pub const BOILERPLATE_TAIL: &str = "</body>\n</html>\n";

/// SVG-side tags are written self-closing when empty; HTML tags always get an
/// end tag.
fn self_closing(tag: &str) -> bool {
    matches!(
        tag,
        "svg" | "g" | "rect" | "circle" | "ellipse" | "line" | "polyline" | "polygon" | "path" | "text"
    )
}

pub(crate) fn escape_text(text: &str, out: &mut String) {
    if !text.contains(['&', '<', '>']) {
        out.push_str(text);
        return;
    }
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
}

pub(crate) fn escape_attr(value: &str, out: &mut String) {
    if !value.contains(['&', '<', '>', '"']) {
        out.push_str(value);
        return;
    }
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
}

/// Uniform access to the owned and the arena-backed node forms.
trait NodeView: Sized {
    fn tag(&self) -> &str;
    fn id(&self) -> Option<&str>;
    fn attrs(&self) -> Vec<(&str, &str)>;
    fn text(&self) -> Option<&str>;
    fn children(&self) -> Vec<Self>;
    fn is_text_run(&self) -> bool;
}

impl NodeView for &DomNode {
    fn tag(&self) -> &str {
        &self.tag
    }
    fn id(&self) -> Option<&str> {
        self.id.as_ref().map(|i| i.as_str())
    }
    fn attrs(&self) -> Vec<(&str, &str)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
    }
    fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }
    fn children(&self) -> Vec<Self> {
        self.children.iter().collect()
    }
    fn is_text_run(&self) -> bool {
        DomNode::is_text_run(self)
    }
}

impl<'a> NodeView for NodeRef<'a> {
    fn tag(&self) -> &str {
        NodeRef::tag(self)
    }
    fn id(&self) -> Option<&str> {
        NodeRef::id(self).map(|i| i.as_str())
    }
    fn attrs(&self) -> Vec<(&str, &str)> {
        NodeRef::attrs(self)
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }
    fn text(&self) -> Option<&str> {
        NodeRef::text(self)
    }
    fn children(&self) -> Vec<Self> {
        NodeRef::children(self).collect()
    }
    fn is_text_run(&self) -> bool {
        NodeRef::is_text_run(self)
    }
}

fn write_node<N: NodeView>(node: &N, depth: usize, inline: bool, out: &mut String) {
    if node.is_text_run() {
        escape_text(node.text().unwrap_or_default(), out);
        return;
    }
    let indent = |out: &mut String| {
        for _ in 0..depth {
            out.push_str("  ");
        }
    };
    if !inline {
        indent(out);
    }
    let tag = node.tag();
    out.push('<');
    out.push_str(tag);
    if let Some(id) = node.id() {
        out.push_str(" id=\"");
        escape_attr(id, out);
        out.push('"');
    }
    for (name, value) in node.attrs() {
        out.push(' ');
        out.push_str(name);
        out.push_str("=\"");
        escape_attr(value, out);
        out.push('"');
    }
    let children = node.children();
    if node.text().is_none() && children.is_empty() {
        if self_closing(tag) {
            out.push_str("/>");
        } else {
            let _ = write!(out, "></{tag}>");
        }
        if !inline {
            out.push('\n');
        }
        return;
    }
    out.push('>');
    let mixed = node.text().is_some() || children.iter().any(NodeView::is_text_run);
    if inline || mixed {
        if let Some(text) = node.text() {
            escape_text(text, out);
        }
        for child in &children {
            write_node(child, 0, true, out);
        }
        let _ = write!(out, "</{tag}>");
        if !inline {
            out.push('\n');
        }
    } else {
        out.push('\n');
        for child in &children {
            write_node(child, depth + 1, false, out);
        }
        indent(out);
        let _ = writeln!(out, "</{tag}>");
    }
}

impl DomState {
    /// Canonical document text.
    pub fn serialize(&self) -> String {
        let mut out = String::from(BOILERPLATE_HEAD);
        for child in self.body().children() {
            write_node(&child, 1, false, &mut out);
        }
        out.push_str(BOILERPLATE_TAIL);
        out
    }

    /// Canonical text of the body contents only, without indentation of the
    /// first level. This is the payload a final answer usually carries.
    pub fn serialize_body(&self) -> String {
        let mut out = String::new();
        for child in self.body().children() {
            write_node(&child, 0, false, &mut out);
        }
        out
    }

    /// Canonical text of one addressable subtree.
    pub fn serialize_node(&self, id: &str) -> Option<String> {
        let node = self.lookup(id)?;
        let mut out = String::new();
        write_node(&node, 0, false, &mut out);
        Some(out)
    }
}

/// Canonical text of a detached subtree.
pub fn serialize_tree(node: &DomNode) -> String {
    let mut out = String::new();
    write_node(&node, 0, false, &mut out);
    out
}
