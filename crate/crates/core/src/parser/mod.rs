//! Deterministic fragment parser for the supported HTML/SVG subset.
//!
//! Strict by construction: there is no error recovery. The first problem in
//! document order is reported as a [`ParseDiagnostic`] and no partial tree is
//! ever returned.

pub mod values;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dom::{DomNode, DomState, NodeId};

pub const DEFAULT_CANVAS_WIDTH: f64 = 500.0;

/// Deepest element nesting accepted in one fragment.
pub const MAX_DEPTH: usize = 64;

pub const HTML_TAGS: &[&str] = &["div", "span", "strong", "ul", "li", "table", "tr", "td"];
pub const SVG_TAGS: &[&str] = &[
    "svg", "g", "rect", "circle", "ellipse", "line", "polyline", "polygon", "path", "text",
];

/// Attributes that must hold a finite decimal (an optional `px` unit is allowed).
pub const NUMERIC_ATTRS: &[&str] = &[
    "x", "y", "cx", "cy", "r", "rx", "ry", "width", "height", "x1", "y1", "x2", "y2",
    "stroke-width", "font-size",
];

pub fn is_supported_tag(tag: &str) -> bool {
    HTML_TAGS.contains(&tag) || SVG_TAGS.contains(&tag)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagnosticKind {
    MalformedMarkup,
    UnsupportedTag,
    MissingRequiredAttribute,
    DuplicateIdInFragment,
    OversizeDimension,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    /// Byte offset into the fragment text.
    pub offset: usize,
    /// Open elements at the error, e.g. `/svg#sg1/rect`.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub kind: DiagnosticKind,
    pub location: Location,
    pub message: String,
    /// The offending id for duplicate-id diagnostics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
}

impl ParseDiagnostic {
    pub fn new(kind: DiagnosticKind, offset: usize, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind,
            location: Location {
                offset,
                path: path.into(),
            },
            message: message.into(),
            subject: None,
        }
    }

    fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = Some(subject.into());
        self
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} at byte {}",
            self.kind, self.location.offset
        )?;
        if !self.location.path.is_empty() {
            write!(f, " ({})", self.location.path)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ParseDiagnostic {}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Span {
    offset: usize,
    path: String,
}

/// A parsed, self-consistent fragment ready to be mounted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub roots: Vec<DomNode>,
    pub introduced_ids: BTreeSet<NodeId>,
    pub source_text: String,
    /// Source location of every element, in pre-order.
    spans: Vec<Span>,
}

impl Fragment {
    /// Element ids in document order.
    pub fn ids_in_order(&self) -> Vec<&NodeId> {
        self.elements().filter_map(|n| n.id.as_ref()).collect()
    }

    fn elements(&self) -> impl Iterator<Item = &DomNode> {
        self.roots
            .iter()
            .flat_map(|r| r.walk())
            .filter(|n| !n.is_text_run())
    }
}

pub fn is_attribute_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == ':')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | ':' | '.'))
}

/// Checks one attribute against the value grammars. `canvas_width`, when
/// given, also bounds `width`.
pub fn check_attribute(
    _tag: &str,
    name: &str,
    value: &str,
    canvas_width: f64,
) -> Result<(), ParseDiagnostic> {
    check_value(name, value, Some(canvas_width))
        .map_err(|(kind, msg)| ParseDiagnostic::new(kind, 0, "", msg))
}

fn check_value(name: &str, value: &str, canvas_width: Option<f64>) -> Result<(), (DiagnosticKind, String)> {
    use DiagnosticKind::*;
    if !is_attribute_name(name) {
        return Err((MalformedMarkup, format!("invalid attribute name {name:?}")));
    }
    if NUMERIC_ATTRS.contains(&name) {
        let Some(v) = values::parse_length(value) else {
            return Err((
                MalformedMarkup,
                format!("attribute {name} expects a finite number, got {value:?}"),
            ));
        };
        if let (Some(limit), "width") = (canvas_width, name) {
            if v > limit {
                return Err((
                    OversizeDimension,
                    format!("width {v} exceeds the canvas width {limit}"),
                ));
            }
        }
        return Ok(());
    }
    match name {
        "d" => values::parse_path(value)
            .map(drop)
            .map_err(|e| (MalformedMarkup, format!("invalid path data: {e}"))),
        "points" => values::parse_points(value)
            .map(drop)
            .ok_or_else(|| (MalformedMarkup, format!("invalid point list {value:?}"))),
        "viewBox" => values::parse_view_box(value)
            .map(drop)
            .ok_or_else(|| (MalformedMarkup, format!("invalid viewBox {value:?}"))),
        _ => Ok(()),
    }
}

struct Frame {
    node: DomNode,
    offset: usize,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    stack: Vec<Frame>,
    roots: Vec<DomNode>,
    spans: Vec<Span>,
    seen_ids: HashSet<NodeId>,
    text: String,
    text_start: usize,
    /// Record element spans; only fragments need them.
    track_spans: bool,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            stack: Vec::new(),
            roots: Vec::new(),
            spans: Vec::new(),
            seen_ids: HashSet::new(),
            text: String::new(),
            text_start: 0,
            track_spans: true,
        }
    }

    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn path(&self) -> String {
        let mut out = String::new();
        for frame in &self.stack {
            out.push('/');
            out.push_str(&frame.node.tag);
            if let Some(id) = &frame.node.id {
                out.push('#');
                out.push_str(id.as_str());
            }
        }
        out
    }

    fn err(&self, kind: DiagnosticKind, offset: usize, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic::new(kind, offset, self.path(), message)
    }

    fn malformed(&self, offset: usize, message: impl Into<String>) -> ParseDiagnostic {
        self.err(DiagnosticKind::MalformedMarkup, offset, message)
    }

    fn run(mut self, allow_empty: bool) -> PResult<(Vec<DomNode>, Vec<Span>)> {
        let bytes = self.bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'<' => {
                    self.flush_text()?;
                    self.tag()?;
                }
                b'&' => {
                    self.note_text_start();
                    let decoded = decode_entity(&self.src[self.pos..]);
                    match decoded {
                        Some((c, len)) => {
                            self.text.push(c);
                            self.pos += len;
                        }
                        None => {
                            self.text.push('&');
                            self.pos += 1;
                        }
                    }
                }
                _ => {
                    self.note_text_start();
                    let rest = &self.src[self.pos..];
                    let end = rest.find(['<', '&']).unwrap_or(rest.len());
                    self.text.push_str(&rest[..end]);
                    self.pos += end;
                }
            }
        }
        self.flush_text()?;
        if let Some(frame) = self.stack.last() {
            let offset = frame.offset;
            let tag = frame.node.tag.clone();
            return Err(self.malformed(offset, format!("unclosed <{tag}>")));
        }
        if self.roots.is_empty() && !allow_empty {
            return Err(ParseDiagnostic::new(
                DiagnosticKind::MalformedMarkup,
                0,
                "",
                "fragment contains no elements",
            ));
        }
        Ok((self.roots, self.spans))
    }

    fn note_text_start(&mut self) {
        if self.text.is_empty() {
            self.text_start = self.pos;
        }
    }

    fn flush_text(&mut self) -> PResult<()> {
        if self.text.is_empty() {
            return Ok(());
        }
        if self.text.chars().all(char::is_whitespace) {
            self.text.clear();
            return Ok(());
        }
        let text = std::mem::take(&mut self.text);
        let Some(frame) = self.stack.last_mut() else {
            return Err(self.malformed(self.text_start, "text outside of an element"));
        };
        if frame.node.children.is_empty() {
            frame.node.text = Some(text);
        } else {
            frame.node.children.push(DomNode::text_run(text));
        }
        Ok(())
    }

    fn scan_name(&self, from: usize) -> usize {
        let bytes = self.bytes();
        let mut end = from;
        if bytes.get(end).is_some_and(u8::is_ascii_alphabetic) {
            end += 1;
            while bytes
                .get(end)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'-')
            {
                end += 1;
            }
        }
        end
    }

    fn skip_ws(&mut self) -> usize {
        let start = self.pos;
        while self.bytes().get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn tag(&mut self) -> PResult<()> {
        let bytes = self.bytes();
        let open = self.pos;
        match bytes.get(open + 1) {
            Some(b'/') => self.end_tag(open),
            Some(b) if b.is_ascii_alphabetic() => self.start_tag(open),
            Some(b'!' | b'?') => Err(self.malformed(
                open,
                "comments, doctypes and processing instructions are not supported",
            )),
            _ => Err(self.malformed(open, "unescaped '<' in text (write &lt;)")),
        }
    }

    fn end_tag(&mut self, open: usize) -> PResult<()> {
        let name_start = open + 2;
        let name_end = self.scan_name(name_start);
        if name_end == name_start {
            return Err(self.malformed(open, "expected a tag name after '</'"));
        }
        let name = &self.src[name_start..name_end];
        self.pos = name_end;
        self.skip_ws();
        if self.bytes().get(self.pos) != Some(&b'>') {
            return Err(self.malformed(open, format!("unterminated end tag </{name}")));
        }
        self.pos += 1;
        let Some(frame) = self.stack.last() else {
            return Err(self.malformed(open, format!("unexpected end tag </{name}>")));
        };
        if frame.node.tag != name {
            let expected = frame.node.tag.clone();
            return Err(self.malformed(
                open,
                format!("mismatched end tag </{name}>, expected </{expected}>"),
            ));
        }
        let frame = self.stack.pop().expect("checked above");
        self.close(frame.node);
        Ok(())
    }

    fn close(&mut self, node: DomNode) {
        match self.stack.last_mut() {
            Some(parent) => parent.node.children.push(node),
            None => self.roots.push(node),
        }
    }

    fn start_tag(&mut self, open: usize) -> PResult<()> {
        let name_end = self.scan_name(open + 1);
        let tag = self.src[open + 1..name_end].to_owned();
        if !is_supported_tag(&tag) {
            return Err(self.err(
                DiagnosticKind::UnsupportedTag,
                open,
                format!("<{tag}> is not in the supported element set"),
            ));
        }
        if self.stack.len() >= MAX_DEPTH {
            return Err(self.malformed(open, format!("elements nested deeper than {MAX_DEPTH}")));
        }
        self.pos = name_end;
        let mut node = DomNode::element(tag);
        let self_closing;
        loop {
            let ws = self.skip_ws();
            let at = self.pos;
            match self.bytes().get(at) {
                None => return Err(self.malformed(open, format!("unterminated start tag <{}", node.tag))),
                Some(b'>') => {
                    self.pos += 1;
                    self_closing = false;
                    break;
                }
                Some(b'/') => {
                    if self.bytes().get(at + 1) != Some(&b'>') {
                        return Err(self.malformed(at, "expected '>' after '/'"));
                    }
                    self.pos += 2;
                    self_closing = true;
                    break;
                }
                Some(b) if b.is_ascii_alphabetic() || *b == b'_' || *b == b':' => {
                    if ws == 0 {
                        return Err(self.malformed(at, "expected whitespace before attribute"));
                    }
                    self.attribute(&mut node)?;
                }
                Some(_) => {
                    let c = self.src[at..].chars().next().unwrap_or('?');
                    return Err(self.malformed(at, format!("unexpected {c:?} in start tag")));
                }
            }
        }
        if self.stack.is_empty() && node.id.is_none() {
            return Err(self.err(
                DiagnosticKind::MissingRequiredAttribute,
                open,
                format!("top-level <{}> needs an id attribute", node.tag),
            ));
        }
        if self.track_spans {
            let mut path = self.path();
            path.push('/');
            path.push_str(&node.tag);
            if let Some(id) = &node.id {
                path.push('#');
                path.push_str(id.as_str());
            }
            self.spans.push(Span { offset: open, path });
        }
        if self_closing {
            self.close(node);
        } else {
            self.stack.push(Frame { node, offset: open });
        }
        Ok(())
    }

    fn attribute(&mut self, node: &mut DomNode) -> PResult<()> {
        let bytes = self.bytes();
        let start = self.pos;
        let mut end = start + 1;
        while bytes
            .get(end)
            .is_some_and(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b':' | b'.'))
        {
            end += 1;
        }
        let name = self.src[start..end].to_owned();
        self.pos = end;
        let save = self.pos;
        self.skip_ws();
        let value = if bytes.get(self.pos) == Some(&b'=') {
            self.pos += 1;
            self.skip_ws();
            match bytes.get(self.pos) {
                Some(&q @ (b'"' | b'\'')) => {
                    let body_start = self.pos + 1;
                    let Some(len) = self.src[body_start..].find(q as char) else {
                        return Err(self.malformed(start, format!("unterminated value for attribute {name}")));
                    };
                    self.pos = body_start + len + 1;
                    decode_entities(&self.src[body_start..body_start + len])
                }
                _ => {
                    let vstart = self.pos;
                    while bytes.get(self.pos).is_some_and(|b| {
                        !b.is_ascii_whitespace() && !matches!(b, b'"' | b'\'' | b'=' | b'<' | b'>' | b'`')
                    }) {
                        self.pos += 1;
                    }
                    if self.pos == vstart {
                        return Err(self.malformed(start, format!("missing value for attribute {name}")));
                    }
                    // A trailing '/' belongs to a self-closing tag, not the value.
                    if bytes[self.pos - 1] == b'/' && bytes.get(self.pos) == Some(&b'>') {
                        self.pos -= 1;
                    }
                    decode_entities(&self.src[vstart..self.pos])
                }
            }
        } else {
            self.pos = save;
            String::new()
        };
        if name == "id" {
            if node.id.is_some() {
                return Err(self.malformed(start, "duplicate attribute id"));
            }
            let id = NodeId::new(value.clone())
                .map_err(|e| self.malformed(start, e.to_string()))?;
            if !self.seen_ids.insert(id.clone()) {
                return Err(self
                    .err(
                        DiagnosticKind::DuplicateIdInFragment,
                        start,
                        format!("id {id:?} appears more than once in the fragment"),
                    )
                    .with_subject(id.as_str()));
            }
            node.id = Some(id);
            return Ok(());
        }
        if node.attrs.contains_key(&name) {
            return Err(self.malformed(start, format!("duplicate attribute {name}")));
        }
        check_value(&name, &value, None).map_err(|(kind, msg)| self.err(kind, start, msg))?;
        node.attrs.insert(name, value);
        Ok(())
    }
}

const ENTITIES: &[(&str, char)] = &[
    ("&amp;", '&'),
    ("&lt;", '<'),
    ("&gt;", '>'),
    ("&quot;", '"'),
    ("&apos;", '\''),
];

fn decode_entity(s: &str) -> Option<(char, usize)> {
    ENTITIES
        .iter()
        .find(|(name, _)| s.starts_with(name))
        .map(|(name, c)| (*c, name.len()))
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_owned();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        match decode_entity(rest) {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Parses a raw fragment. Every top-level element must carry an id.
pub fn parse_fragment(text: &str) -> Result<Fragment, ParseDiagnostic> {
    let (roots, spans) = Parser::new(text).run(false)?;
    let introduced_ids = roots
        .iter()
        .flat_map(|r| r.walk())
        .filter_map(|n| n.id.clone())
        .collect();
    Ok(Fragment {
        roots,
        introduced_ids,
        source_text: text.to_owned(),
        spans,
    })
}

/// Parses body content of a canonical document; empty content is allowed.
pub(crate) fn parse_body(text: &str) -> Result<Vec<DomNode>, ParseDiagnostic> {
    let mut parser = Parser::new(text);
    parser.track_spans = false;
    parser.run(true).map(|(roots, _)| roots)
}

/// Checks a fragment against the state it would be mounted into.
///
/// When `replacing` names a node, ids inside that node's subtree are not
/// collisions, because they leave the state with it.
pub fn validate_fragment(
    frag: &Fragment,
    state: &DomState,
    replacing: Option<&NodeId>,
) -> Result<(), ParseDiagnostic> {
    let excluded: HashSet<NodeId> = replacing
        .map(|id| state.subtree_ids(id.as_str()).into_iter().collect())
        .unwrap_or_default();
    let limit = state.canvas_width();
    for (node, span) in frag.elements().zip(&frag.spans) {
        if let Some(id) = &node.id {
            if state.contains_id(id.as_str()) && !excluded.contains(id) {
                return Err(ParseDiagnostic::new(
                    DiagnosticKind::DuplicateIdInFragment,
                    span.offset,
                    span.path.clone(),
                    format!("id {:?} already exists in the document", id.as_str()),
                )
                .with_subject(id.as_str()));
            }
        }
        if let Some(width) = node.attr("width").and_then(values::parse_length) {
            if width > limit {
                return Err(ParseDiagnostic::new(
                    DiagnosticKind::OversizeDimension,
                    span.offset,
                    span.path.clone(),
                    format!("width {width} exceeds the canvas width {limit}"),
                ));
            }
        }
    }
    Ok(())
}
