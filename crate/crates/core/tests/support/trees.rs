//! Random valid fragments and documents.

use rand::seq::IndexedRandom;
use rand::Rng;
use slate_core::dom::{Action, DomState};

const WORDS: &[&str] = &["alpha", "beta", "gamma", "delta", "note", "bar", "12.5", "x&y"];
const COLORS: &[&str] = &["#a629a6", "red", "#0af", "rgb(1,2,3)", "none", "teal"];

/// Hands out ids that never repeat within one sequence.
#[derive(Debug, Default)]
pub struct IdSource {
    next: usize,
}

impl IdSource {
    pub fn fresh(&mut self) -> String {
        self.next += 1;
        format!("n{}", self.next)
    }
}

fn escape(word: &str) -> String {
    word.replace('&', "&amp;")
}

fn words<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..=3);
    (0..n).map(|_| escape(WORDS.choose(rng).unwrap())).collect::<Vec<_>>().join(" ")
}

fn svg_child<R: Rng>(rng: &mut R, ids: &mut IdSource, depth: usize) -> String {
    svg_element(rng, ids, depth, false)
}

fn svg_element<R: Rng>(rng: &mut R, ids: &mut IdSource, depth: usize, with_id: bool) -> String {
    let id = if with_id || rng.random_bool(0.7) {
        format!(" id=\"{}\"", ids.fresh())
    } else {
        String::new()
    };
    let fill = COLORS.choose(rng).unwrap();
    match rng.random_range(0..5) {
        0 => format!(
            "<rect{id} x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
            rng.random_range(0..200),
            rng.random_range(0..100),
            rng.random_range(1..120),
            rng.random_range(1..80)
        ),
        1 => format!(
            "<circle{id} cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            rng.random_range(0..200),
            rng.random_range(0..100),
            rng.random_range(1..40)
        ),
        2 => format!("<text{id} x=\"5\" y=\"20\">{}</text>", words(rng)),
        3 if depth < 3 => {
            let kids: String = (0..rng.random_range(0..3)).map(|_| svg_child(rng, ids, depth + 1)).collect();
            format!("<g{id} fill=\"{fill}\">{kids}</g>")
        }
        _ => format!("<line{id} x1=\"0\" y1=\"0\" x2=\"{}\" y2=\"9\" stroke=\"{fill}\"/>", rng.random_range(1..200)),
    }
}

fn html_child<R: Rng>(rng: &mut R, ids: &mut IdSource, depth: usize) -> String {
    let id = if rng.random_bool(0.7) {
        format!(" id=\"{}\"", ids.fresh())
    } else {
        String::new()
    };
    match rng.random_range(0..4) {
        0 => format!("<span{id}>{}</span>", words(rng)),
        1 => format!("<strong{id}>{}</strong>", words(rng)),
        2 if depth < 3 => {
            let mut body = String::new();
            if rng.random_bool(0.5) {
                body.push_str(&words(rng));
            }
            for _ in 0..rng.random_range(0..3) {
                body.push_str(&html_child(rng, ids, depth + 1));
                if rng.random_bool(0.4) {
                    body.push(' ');
                    body.push_str(&words(rng));
                }
            }
            format!("<div{id}>{body}</div>")
        }
        _ => {
            let items: String = (0..rng.random_range(1..3))
                .map(|_| format!("<li id=\"{}\">{}</li>", ids.fresh(), words(rng)))
                .collect();
            format!("<ul{id}>{items}</ul>")
        }
    }
}

/// One top-level element with a fresh id; may be HTML, SVG or a bare shape.
pub fn fragment<R: Rng>(rng: &mut R, ids: &mut IdSource) -> String {
    match rng.random_range(0..3) {
        0 => {
            let id = ids.fresh();
            let kids: String = (0..rng.random_range(0..4)).map(|_| svg_child(rng, ids, 1)).collect();
            format!("<svg id=\"{id}\" width=\"{}\" height=\"{}\">{kids}</svg>", rng.random_range(10..300), rng.random_range(10..200))
        }
        1 => {
            let id = ids.fresh();
            let mut body = words(rng);
            for _ in 0..rng.random_range(0..4) {
                body.push_str(&html_child(rng, ids, 1));
                if rng.random_bool(0.5) {
                    body.push(' ');
                    body.push_str(&words(rng));
                }
            }
            format!("<div id=\"{id}\">{body}</div>")
        }
        _ => svg_element(rng, ids, 0, true),
    }
}

/// A state built from `n` random top-level and nested inserts.
pub fn random_state<R: Rng>(rng: &mut R, ids: &mut IdSource, n: usize) -> DomState {
    let mut state = DomState::new();
    for _ in 0..n {
        let mut containers: Vec<String> = state
            .ids()
            .filter(|id| {
                let tag = state.lookup(id.as_str()).unwrap().tag();
                matches!(tag, "div" | "svg" | "g" | "ul")
            })
            .map(|id| id.as_str().to_owned())
            .collect();
        containers.sort();
        let root = if !containers.is_empty() && rng.random_bool(0.5) {
            Some(containers.choose(rng).unwrap().clone())
        } else {
            None
        };
        let action = Action::insert(fragment(rng, ids), root.as_deref());
        state.apply(&action).expect("generated insert is valid");
    }
    state
}

/// Builds a random tree, replaces one random non-body element and checks
/// that the replacement sits at the old parent and sibling index.
pub fn replace_keeps_position<R: Rng>(rng: &mut R) -> Result<(), String> {
    let mut ids = IdSource::default();
    let size = rng.random_range(1..12);
    let mut state = random_state(rng, &mut ids, size);
    let mut targets: Vec<String> = state
        .ids()
        .filter(|i| !i.is_reserved())
        .map(|i| i.as_str().to_owned())
        .collect();
    targets.sort();
    let target = targets.choose(rng).ok_or("empty tree")?.clone();
    let (parent, index, siblings) = {
        let node = state.lookup(&target).unwrap();
        let parent = node.parent().expect("non-body node has a parent");
        (
            parent.id().map(|p| p.as_str().to_owned()),
            node.sibling_index().unwrap(),
            parent.child_count(),
        )
    };
    let replacement = fragment(rng, &mut ids);
    let new_id = replacement_id(&replacement);
    state
        .apply(&Action::replace(&target, replacement.clone()))
        .map_err(|e| format!("replace {target} rejected: {e}"))?;
    let node = state.lookup(&new_id).ok_or("replacement not addressable")?;
    let now_parent = node.parent().and_then(|p| p.id()).map(|p| p.as_str().to_owned());
    if now_parent != parent || node.sibling_index() != Some(index) || node.parent().unwrap().child_count() != siblings {
        return Err(format!(
            "replace {target}: expected parent {parent:?} index {index} of {siblings}, got {now_parent:?} index {:?} of {}",
            node.sibling_index(),
            node.parent().unwrap().child_count()
        ));
    }
    if state.contains_id(&target) {
        return Err(format!("{target} still present"));
    }
    Ok(())
}

fn replacement_id(fragment: &str) -> String {
    let start = fragment.find("id=\"").expect("top-level id") + 4;
    let len = fragment[start..].find('"').unwrap();
    fragment[start..start + len].to_owned()
}
