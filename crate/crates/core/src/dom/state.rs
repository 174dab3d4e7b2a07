use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use super::{normalize_text, Action, DomNode, NodeId, ROOT_ID, TEXT_ATTR, TEXT_RUN_TAG};
use crate::parser::{self, DiagnosticKind, Fragment, ParseDiagnostic, DEFAULT_CANVAS_WIDTH};

const BODY: usize = 0;

#[derive(Debug, Clone)]
struct Slot {
    id: Option<NodeId>,
    tag: String,
    attrs: IndexMap<String, String>,
    text: Option<String>,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// The substrate state: body container, address map and revision counter.
///
/// Value-semantic; `clone` produces an independent snapshot.
#[derive(Debug, Clone)]
pub struct DomState {
    slots: Vec<Option<Slot>>,
    free: Vec<usize>,
    addr: HashMap<NodeId, usize>,
    revision: u64,
    canvas_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApplyReport {
    /// Revision after the action.
    pub revision: u64,
    /// Arena slots read or written while applying, excluding parsing.
    pub touched: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApplyError {
    #[error("unknown target id {0:?}")]
    UnknownTarget(String),
    #[error("invalid fragment: {0}")]
    InvalidFragment(ParseDiagnostic),
    #[error("duplicate id {id:?}: {diagnostic}")]
    DuplicateId { id: String, diagnostic: ParseDiagnostic },
    #[error("beforeId {before:?} is not a child of {root:?}")]
    InvalidAnchor { before: String, root: String },
    #[error("{0:?} is reserved and cannot be modified, replaced or removed")]
    ReservedTarget(String),
    #[error("attribute {0:?} cannot be changed with modify_element")]
    ProtectedAttribute(String),
}

impl ApplyError {
    pub fn kind(&self) -> &'static str {
        match self {
            ApplyError::UnknownTarget(_) => "UnknownTarget",
            ApplyError::InvalidFragment(_) => "InvalidFragment",
            ApplyError::DuplicateId { .. } => "DuplicateId",
            ApplyError::InvalidAnchor { .. } => "InvalidAnchor",
            ApplyError::ReservedTarget(_) => "ReservedTarget",
            ApplyError::ProtectedAttribute(_) => "ProtectedAttribute",
        }
    }

    fn from_diagnostic(diagnostic: ParseDiagnostic) -> Self {
        if diagnostic.kind == DiagnosticKind::DuplicateIdInFragment {
            let id = diagnostic.subject.clone().unwrap_or_default();
            ApplyError::DuplicateId { id, diagnostic }
        } else {
            ApplyError::InvalidFragment(diagnostic)
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("document does not use the canonical boilerplate")]
    Boilerplate,
    #[error("document body: {0}")]
    Body(ParseDiagnostic),
}

/// Borrowed view of one element in a [`DomState`].
#[derive(Clone, Copy)]
pub struct NodeRef<'a> {
    state: &'a DomState,
    key: usize,
}

impl<'a> NodeRef<'a> {
    fn slot(&self) -> &'a Slot {
        self.state.slot(self.key)
    }

    pub fn id(&self) -> Option<&'a NodeId> {
        self.slot().id.as_ref()
    }

    pub fn tag(&self) -> &'a str {
        &self.slot().tag
    }

    pub fn attr(&self, name: &str) -> Option<&'a str> {
        self.slot().attrs.get(name).map(String::as_str)
    }

    pub fn attrs(&self) -> &'a IndexMap<String, String> {
        &self.slot().attrs
    }

    pub fn text(&self) -> Option<&'a str> {
        self.slot().text.as_deref()
    }

    pub fn is_text_run(&self) -> bool {
        self.slot().tag == TEXT_RUN_TAG
    }

    pub fn is_body(&self) -> bool {
        self.key == BODY
    }

    pub fn children(&self) -> impl Iterator<Item = NodeRef<'a>> + 'a {
        let state = self.state;
        self.slot()
            .children
            .iter()
            .map(move |&key| NodeRef { state, key })
    }

    pub fn child_count(&self) -> usize {
        self.slot().children.len()
    }

    pub fn parent(&self) -> Option<NodeRef<'a>> {
        self.slot().parent.map(|key| NodeRef {
            state: self.state,
            key,
        })
    }

    /// Position among the parent's children (text runs included).
    pub fn sibling_index(&self) -> Option<usize> {
        let parent = self.slot().parent?;
        self.state
            .slot(parent)
            .children
            .iter()
            .position(|&k| k == self.key)
    }

    pub fn to_tree(&self) -> DomNode {
        let slot = self.slot();
        DomNode {
            id: slot.id.clone(),
            tag: slot.tag.clone(),
            attrs: slot.attrs.clone(),
            text: slot.text.clone(),
            children: self.children().map(|c| c.to_tree()).collect(),
        }
    }
}

impl std::fmt::Debug for NodeRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NodeRef")
            .field("id", &self.id())
            .field("tag", &self.tag())
            .finish()
    }
}

impl Default for DomState {
    fn default() -> Self {
        Self::new()
    }
}

impl DomState {
    /// Boilerplate document with an empty body, revision 0.
    pub fn new() -> Self {
        Self::with_canvas_width(DEFAULT_CANVAS_WIDTH)
    }

    pub fn with_canvas_width(canvas_width: f64) -> Self {
        let body = Slot {
            id: Some(NodeId::root()),
            tag: "body".into(),
            attrs: IndexMap::new(),
            text: None,
            parent: None,
            children: Vec::new(),
        };
        let mut addr = HashMap::new();
        addr.insert(NodeId::root(), BODY);
        Self {
            slots: vec![Some(body)],
            free: Vec::new(),
            addr,
            revision: 0,
            canvas_width,
        }
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn canvas_width(&self) -> f64 {
        self.canvas_width
    }

    pub fn body(&self) -> NodeRef<'_> {
        NodeRef {
            state: self,
            key: BODY,
        }
    }

    /// Direct address-map lookup; `"root"` resolves to the body container.
    pub fn lookup(&self, id: &str) -> Option<NodeRef<'_>> {
        self.addr.get(id).map(|&key| NodeRef { state: self, key })
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.addr.contains_key(id)
    }

    /// All registered ids, reserved ones included, in no particular order.
    pub fn ids(&self) -> impl Iterator<Item = &NodeId> {
        self.addr.keys()
    }

    /// Number of elements under the body, text runs excluded.
    pub fn element_count(&self) -> usize {
        self.slots
            .iter()
            .flatten()
            .filter(|s| s.tag != TEXT_RUN_TAG)
            .count()
            - 1
    }

    pub fn body_tree(&self) -> Vec<DomNode> {
        self.body().children().map(|c| c.to_tree()).collect()
    }

    /// Ids of the subtree rooted at `id` (inclusive), in pre-order.
    pub fn subtree_ids(&self, id: &str) -> Vec<NodeId> {
        let Some(&key) = self.addr.get(id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack = vec![key];
        while let Some(k) = stack.pop() {
            let slot = self.slot(k);
            if let Some(id) = &slot.id {
                out.push(id.clone());
            }
            stack.extend(slot.children.iter().rev());
        }
        out
    }

    /// Builds a state whose body holds `nodes`; used by document parsing.
    pub fn from_body_nodes(nodes: Vec<DomNode>, canvas_width: f64) -> Result<Self, DuplicateIdError> {
        let mut state = Self::with_canvas_width(canvas_width);
        let mut seen = HashSet::new();
        for node in &nodes {
            for n in node.walk() {
                if let Some(id) = &n.id {
                    if id.is_reserved() || !seen.insert(id.clone()) {
                        return Err(DuplicateIdError(id.clone()));
                    }
                }
            }
        }
        for node in nodes {
            let key = state.build(BODY, node, &mut 0);
            state.slot_mut(BODY).children.push(key);
        }
        Ok(state)
    }

    /// Re-parses a canonical serialization (revision starts at 0).
    pub fn parse_document(text: &str, canvas_width: f64) -> Result<Self, DocumentError> {
        let body = text
            .strip_prefix(super::BOILERPLATE_HEAD)
            .and_then(|rest| rest.strip_suffix(super::BOILERPLATE_TAIL))
            .ok_or(DocumentError::Boilerplate)?;
        let nodes = parser::parse_body(body).map_err(DocumentError::Body)?;
        Self::from_body_nodes(nodes, canvas_width).map_err(|DuplicateIdError(id)| {
            DocumentError::Body(ParseDiagnostic::new(
                DiagnosticKind::DuplicateIdInFragment,
                0,
                "/body",
                format!("id {id:?} is duplicated or reserved"),
            ))
        })
    }

    /// Functional form of [`DomState::apply`]: returns the successor state and
    /// leaves `self` untouched.
    pub fn applied(&self, action: &Action) -> Result<DomState, ApplyError> {
        let mut next = self.clone();
        next.apply(action)?;
        Ok(next)
    }

    /// Applies one action atomically. On error nothing changed.
    pub fn apply(&mut self, action: &Action) -> Result<ApplyReport, ApplyError> {
        let mut touched = 0usize;
        match action {
            Action::Insert {
                fragment,
                root_id,
                before_id,
            } => {
                let root_name = root_id.as_ref().map_or(ROOT_ID, NodeId::as_str);
                let parent = *self
                    .addr
                    .get(root_name)
                    .ok_or_else(|| ApplyError::UnknownTarget(root_name.to_owned()))?;
                touched += 1;
                let frag = parse(fragment)?;
                parser::validate_fragment(&frag, self, None).map_err(ApplyError::from_diagnostic)?;
                let index = match before_id {
                    None => self.slot(parent).children.len(),
                    Some(before) => {
                        let anchor_err = || ApplyError::InvalidAnchor {
                            before: before.to_string(),
                            root: root_name.to_owned(),
                        };
                        let &anchor = self.addr.get(before.as_str()).ok_or_else(anchor_err)?;
                        touched += 1;
                        if self.slot(anchor).parent != Some(parent) {
                            return Err(anchor_err());
                        }
                        self.slot(parent)
                            .children
                            .iter()
                            .position(|&k| k == anchor)
                            .expect("anchor listed under its parent")
                    }
                };
                self.mount(parent, index, frag, &mut touched);
                self.normalize_runs(parent, &mut touched);
            }
            Action::Modify { target_id, attrs } => {
                let key = self.resolve_target(target_id)?;
                touched += 1;
                for (name, value) in attrs {
                    if name == "id" {
                        return Err(ApplyError::ProtectedAttribute(name.clone()));
                    }
                    if name == TEXT_ATTR {
                        continue;
                    }
                    if let Some(value) = value {
                        parser::check_attribute(&self.slot(key).tag, name, value, self.canvas_width)
                            .map_err(ApplyError::InvalidFragment)?;
                    } else if !parser::is_attribute_name(name) {
                        return Err(ApplyError::InvalidFragment(ParseDiagnostic::new(
                            DiagnosticKind::MalformedMarkup,
                            0,
                            "",
                            format!("invalid attribute name {name:?}"),
                        )));
                    }
                }
                let slot = self.slot_mut(key);
                for (name, value) in attrs {
                    if name == TEXT_ATTR {
                        slot.text = normalize_text(value.clone());
                        continue;
                    }
                    match value {
                        Some(v) => {
                            slot.attrs.insert(name.clone(), v.clone());
                        }
                        None => {
                            slot.attrs.shift_remove(name);
                        }
                    }
                }
            }
            Action::Replace { target_id, fragment } => {
                let key = self.resolve_target(target_id)?;
                touched += 1;
                let frag = parse(fragment)?;
                parser::validate_fragment(&frag, self, Some(target_id))
                    .map_err(ApplyError::from_diagnostic)?;
                let parent = self.slot(key).parent.expect("non-body node has a parent");
                let index = self
                    .slot(parent)
                    .children
                    .iter()
                    .position(|&k| k == key)
                    .expect("target listed under its parent");
                self.slot_mut(parent).children.remove(index);
                self.release(key, &mut touched);
                self.mount(parent, index, frag, &mut touched);
                self.normalize_runs(parent, &mut touched);
            }
            Action::Delete { target_id } => {
                let key = self.resolve_target(target_id)?;
                touched += 1;
                let parent = self.slot(key).parent.expect("non-body node has a parent");
                self.slot_mut(parent).children.retain(|&k| k != key);
                self.release(key, &mut touched);
                self.normalize_runs(parent, &mut touched);
            }
            Action::Clear => {
                let children = std::mem::take(&mut self.slot_mut(BODY).children);
                for child in children {
                    self.release(child, &mut touched);
                }
                self.slot_mut(BODY).text = None;
                touched += 1;
            }
        }
        self.revision += 1;
        Ok(ApplyReport {
            revision: self.revision,
            touched,
        })
    }

    /// Verifies the address map against a full tree walk.
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut seen = HashMap::new();
        let mut stack = vec![BODY];
        while let Some(k) = stack.pop() {
            let slot = self.slot(k);
            if let Some(id) = &slot.id {
                if seen.insert(id.clone(), k).is_some() {
                    return Err(format!("id {id} appears twice in the tree"));
                }
            }
            for &c in &slot.children {
                if self.slot(c).parent != Some(k) {
                    return Err(format!("slot {c} has a stale parent link"));
                }
            }
            stack.extend(slot.children.iter().copied());
        }
        if seen.len() != self.addr.len() {
            return Err(format!(
                "address map has {} keys but tree has {} ids",
                self.addr.len(),
                seen.len()
            ));
        }
        for (id, &k) in &self.addr {
            if seen.get(id) != Some(&k) || self.slot(k).id.as_ref() != Some(id) {
                return Err(format!("address map entry {id} does not resolve to its node"));
            }
        }
        Ok(())
    }

    fn resolve_target(&self, id: &NodeId) -> Result<usize, ApplyError> {
        if id.is_reserved() {
            return Err(ApplyError::ReservedTarget(id.to_string()));
        }
        self.addr
            .get(id.as_str())
            .copied()
            .ok_or_else(|| ApplyError::UnknownTarget(id.to_string()))
    }

    fn slot(&self, key: usize) -> &Slot {
        self.slots[key].as_ref().expect("live slot")
    }

    fn slot_mut(&mut self, key: usize) -> &mut Slot {
        self.slots[key].as_mut().expect("live slot")
    }

    fn alloc(&mut self, slot: Slot) -> usize {
        match self.free.pop() {
            Some(key) => {
                self.slots[key] = Some(slot);
                key
            }
            None => {
                self.slots.push(Some(slot));
                self.slots.len() - 1
            }
        }
    }

    fn mount(&mut self, parent: usize, index: usize, frag: Fragment, touched: &mut usize) {
        let keys: Vec<usize> = frag
            .roots
            .into_iter()
            .map(|node| self.build(parent, node, touched))
            .collect();
        self.slot_mut(parent).children.splice(index..index, keys);
    }

    fn build(&mut self, parent: usize, node: DomNode, touched: &mut usize) -> usize {
        *touched += 1;
        let key = self.alloc(Slot {
            id: node.id.clone(),
            tag: node.tag,
            attrs: node.attrs,
            text: node.text,
            parent: Some(parent),
            children: Vec::with_capacity(node.children.len()),
        });
        if let Some(id) = node.id {
            self.addr.insert(id, key);
        }
        for child in node.children {
            let child_key = self.build(key, child, touched);
            self.slot_mut(key).children.push(child_key);
        }
        key
    }

    fn release(&mut self, key: usize, touched: &mut usize) {
        let mut stack = vec![key];
        while let Some(k) = stack.pop() {
            *touched += 1;
            let slot = self.slots[k].take().expect("live slot");
            if let Some(id) = &slot.id {
                self.addr.remove(id);
            }
            stack.extend(slot.children);
            self.free.push(k);
        }
    }

    /// Keeps the text model canonical after structural edits: adjacent text
    /// runs merge, and a run that became the first child folds into the
    /// parent's leading text.
    fn normalize_runs(&mut self, parent: usize, touched: &mut usize) {
        let children = self.slot(parent).children.clone();
        *touched += children.len();
        if !children.iter().any(|&k| self.slot(k).tag == TEXT_RUN_TAG) {
            return;
        }
        let mut kept: Vec<usize> = Vec::with_capacity(children.len());
        let mut leading = self.slot(parent).text.clone();
        for k in children {
            if self.slot(k).tag != TEXT_RUN_TAG {
                kept.push(k);
                continue;
            }
            let run = self.slot(k).text.clone().unwrap_or_default();
            match kept.last() {
                None => leading.get_or_insert_with(String::new).push_str(&run),
                Some(&prev) if self.slot(prev).tag == TEXT_RUN_TAG => {
                    self.slot_mut(prev).text.get_or_insert_with(String::new).push_str(&run);
                }
                Some(_) => {
                    kept.push(k);
                    continue;
                }
            }
            self.slots[k] = None;
            self.free.push(k);
        }
        let slot = self.slot_mut(parent);
        slot.children = kept;
        slot.text = normalize_text(leading);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("id {0} is duplicated or reserved")]
pub struct DuplicateIdError(pub NodeId);

fn parse(fragment: &str) -> Result<Fragment, ApplyError> {
    parser::parse_fragment(fragment).map_err(ApplyError::from_diagnostic)
}
