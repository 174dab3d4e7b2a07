//! Reference model for CRUD sequences.
//!
//! The model keeps the document as text. Each step re-parses the whole
//! serialization into an owned tree, performs the edit with plain vector
//! surgery and serializes again, so it shares no mutation code with the
//! arena in `DomState`.

use rand::seq::IndexedRandom;
use rand::Rng;
use slate_core::dom::{Action, DomNode, DomState, ROOT_ID, TEXT_RUN_TAG};
use slate_core::parser::parse_fragment;

use super::trees::{fragment, IdSource};

const CANVAS: f64 = 500.0;

pub fn parse(doc: &str) -> Vec<DomNode> {
    DomState::parse_document(doc, CANVAS).expect("oracle document parses").body_tree()
}

pub fn emit(body: Vec<DomNode>) -> String {
    DomState::from_body_nodes(body, CANVAS).expect("oracle ids unique").serialize()
}

fn find_mut<'a>(nodes: &'a mut [DomNode], id: &str) -> Option<&'a mut DomNode> {
    for n in nodes {
        if n.id.as_ref().is_some_and(|i| i.as_str() == id) {
            return Some(n);
        }
        if let Some(found) = find_mut(&mut n.children, id) {
            return Some(found);
        }
    }
    None
}

/// Children list that directly contains `id`, and the index there.
fn find_parent_mut<'a>(nodes: &'a mut Vec<DomNode>, id: &str) -> Option<(&'a mut Vec<DomNode>, usize)> {
    if let Some(i) = nodes.iter().position(|n| n.id.as_ref().is_some_and(|x| x.as_str() == id)) {
        return Some((nodes, i));
    }
    for n in nodes.iter_mut() {
        if let Some(found) = find_parent_mut(&mut n.children, id) {
            return Some(found);
        }
    }
    None
}

/// Folds text runs into the leading text or the previous run.
fn merge_runs(leading: &mut Option<String>, children: &mut Vec<DomNode>) {
    let mut out: Vec<DomNode> = Vec::new();
    for c in children.drain(..) {
        if c.tag != TEXT_RUN_TAG {
            out.push(c);
            continue;
        }
        let run = c.text.clone().unwrap_or_default();
        match out.last_mut() {
            None => leading.get_or_insert_with(String::new).push_str(&run),
            Some(prev) if prev.tag == TEXT_RUN_TAG => prev.text.get_or_insert_with(String::new).push_str(&run),
            Some(_) => out.push(c),
        }
    }
    *children = out;
    if leading.as_deref().is_some_and(|t| t.chars().all(char::is_whitespace)) {
        *leading = None;
    }
}

fn merge_runs_under(body: &mut Vec<DomNode>, parent: Option<&str>) {
    match parent {
        None => {
            let mut lead = None;
            merge_runs(&mut lead, body);
        }
        Some(id) => {
            let node = find_mut(body, id).expect("parent exists");
            merge_runs(&mut node.text, &mut node.children);
        }
    }
}

fn parent_id_of(body: &[DomNode], id: &str) -> Option<String> {
    fn walk(nodes: &[DomNode], parent: Option<&DomNode>, id: &str) -> Option<Option<String>> {
        for n in nodes {
            if n.id.as_ref().is_some_and(|x| x.as_str() == id) {
                return Some(parent.and_then(|p| p.id.as_ref()).map(|p| p.as_str().to_owned()));
            }
            if let Some(r) = walk(&n.children, Some(n), id) {
                return Some(r);
            }
        }
        None
    }
    walk(body, None, id).flatten()
}

/// Applies a valid action to a document text and returns the next text.
pub fn apply(doc: &str, action: &Action) -> String {
    apply_to(parse(doc), action)
}

fn apply_to(mut body: Vec<DomNode>, action: &Action) -> String {
    match action {
        Action::Insert {
            fragment,
            root_id,
            before_id,
        } => {
            let roots = parse_fragment(fragment).expect("valid fragment").roots;
            let parent = root_id.as_ref().map(|r| r.as_str()).filter(|r| *r != ROOT_ID);
            let list = match parent {
                None => &mut body,
                Some(p) => &mut find_mut(&mut body, p).expect("root exists").children,
            };
            let at = match before_id {
                None => list.len(),
                Some(b) => list
                    .iter()
                    .position(|n| n.id.as_ref() == Some(b))
                    .expect("anchor is a child"),
            };
            list.splice(at..at, roots);
            merge_runs_under(&mut body, parent);
        }
        Action::Modify { target_id, attrs } => {
            let node = find_mut(&mut body, target_id.as_str()).expect("target exists");
            for (k, v) in attrs {
                match v {
                    Some(v) => {
                        node.attrs.insert(k.clone(), v.clone());
                    }
                    None => {
                        node.attrs.shift_remove(k);
                    }
                }
            }
        }
        Action::Replace { target_id, fragment } => {
            let parent = parent_id_of(&body, target_id.as_str());
            let roots = parse_fragment(fragment).expect("valid fragment").roots;
            let (list, i) = find_parent_mut(&mut body, target_id.as_str()).expect("target exists");
            list.splice(i..=i, roots);
            merge_runs_under(&mut body, parent.as_deref());
        }
        Action::Delete { target_id } => {
            let parent = parent_id_of(&body, target_id.as_str());
            let (list, i) = find_parent_mut(&mut body, target_id.as_str()).expect("target exists");
            list.remove(i);
            merge_runs_under(&mut body, parent.as_deref());
        }
        Action::Clear => body.clear(),
    }
    emit(body)
}

/// Runs seeds `0..count` on all cores; returns `(seed, message)` failures.
pub fn run_seeds(count: u64, len: usize) -> Vec<(u64, String)> {
    use rand::SeedableRng;
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get()) as u64;
    let failures = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for w in 0..workers {
            let failures = &failures;
            scope.spawn(move || {
                for seed in (w..count).step_by(workers as usize) {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    if let Err(e) = run_sequence(&mut rng, len) {
                        failures.lock().unwrap().push((seed, e));
                    }
                }
            });
        }
    });
    let mut out = failures.into_inner().unwrap();
    out.sort_by_key(|(s, _)| *s);
    out
}

fn all_ids(body: &[DomNode]) -> Vec<(String, String)> {
    body.iter()
        .flat_map(|n| n.walk())
        .filter_map(|n| n.id.as_ref().map(|i| (i.as_str().to_owned(), n.tag.clone())))
        .collect()
}

/// A random action that is valid against `doc`.
pub fn random_action<R: Rng>(rng: &mut R, ids: &mut IdSource, body: &[DomNode]) -> Action {
    let present = all_ids(body);
    let crowded = present.len() > 60;
    let roll = rng.random_range(0..100);
    if present.is_empty() || (roll < 30 && !crowded) {
        let containers: Vec<&(String, String)> = present
            .iter()
            .filter(|(_, t)| matches!(t.as_str(), "div" | "svg" | "g" | "ul" | "span"))
            .collect();
        let root = if !containers.is_empty() && rng.random_bool(0.5) {
            Some(containers.choose(rng).unwrap().0.clone())
        } else if rng.random_bool(0.2) {
            Some(ROOT_ID.to_owned())
        } else {
            None
        };
        let mut action = Action::insert(fragment(rng, ids), root.as_deref());
        if rng.random_bool(0.4) {
            let siblings = match root.as_deref().filter(|r| *r != ROOT_ID) {
                None => body,
                Some(r) => &body.iter().flat_map(|n| n.walk()).find(|n| n.id.as_ref().is_some_and(|i| i.as_str() == r)).unwrap().children[..],
            };
            let anchors: Vec<String> = siblings
                .iter()
                .filter_map(|n| n.id.as_ref().map(|i| i.as_str().to_owned()))
                .collect();
            if let (Some(a), Action::Insert { before_id, .. }) = (anchors.choose(rng), &mut action) {
                *before_id = Some(slate_core::dom::NodeId::new(a.clone()).unwrap());
            }
        }
        return action;
    }
    let (target, _) = present.choose(rng).unwrap().clone();
    match roll {
        _ if roll < 60 => {
            let value = format!("{}", rng.random_range(0..400));
            let color = ["#123456", "blue", "none"].choose(rng).unwrap().to_string();
            let mut attrs: Vec<(&str, Option<&str>)> = Vec::new();
            match rng.random_range(0..4) {
                0 => attrs.push(("x", Some(&value))),
                1 => attrs.push(("fill", Some(&color))),
                2 => attrs.push(("fill", None)),
                _ => {
                    attrs.push(("data-k", Some(&value)));
                    attrs.push(("stroke", Some(&color)));
                }
            }
            Action::modify(&target, attrs)
        }
        _ if roll < 80 => Action::replace(&target, fragment(rng, ids)),
        _ if roll < 99 || crowded => Action::delete(&target),
        _ => Action::Clear,
    }
}

/// Runs one seeded sequence; returns the first mismatch as a message.
pub fn run_sequence<R: Rng>(rng: &mut R, len: usize) -> Result<(), String> {
    let mut ids = IdSource::default();
    let mut state = DomState::new();
    let mut model = state.serialize();
    for step in 0..len {
        let body = parse(&model);
        let action = random_action(rng, &mut ids, &body);
        state
            .apply(&action)
            .map_err(|e| format!("step {step}: valid action rejected: {e}\naction: {}", action.encode()))?;
        model = apply_to(body, &action);
        let actual = state.serialize();
        if actual != model {
            return Err(format!(
                "step {step}: {}\n--- apply ---\n{actual}\n--- oracle ---\n{model}",
                action.encode()
            ));
        }
        state.check_consistency().map_err(|e| format!("step {step}: {e}"))?;
    }
    Ok(())
}
