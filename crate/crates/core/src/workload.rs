//! Synthetic documents for measuring what a correction costs in tokens.

use std::fmt::Write as _;

use crate::dom::{Action, DomState};
use crate::protocol::TokenCounter;

pub const WORKLOAD_SIZES: [usize; 3] = [10, 100, 1000];

const COLUMNS: usize = 50;
const CELL: usize = 10;

/// An `svg` with `n` small rects laid out on a grid, ids `e0..e{n-1}`.
pub fn synthetic_svg(n: usize) -> String {
    let rows = n.div_ceil(COLUMNS).max(1);
    let mut out = format!(
        "<svg id=\"main_svg\" width=\"{}\" height=\"{}\">",
        COLUMNS * CELL,
        rows * CELL
    );
    for k in 0..n {
        let _ = write!(
            out,
            "<rect id=\"e{k}\" x=\"{}\" y=\"{}\" width=\"8\" height=\"8\" fill=\"#1377eb\"/>",
            (k % COLUMNS) * CELL,
            (k / COLUMNS) * CELL
        );
    }
    out.push_str("</svg>");
    out
}

/// The fix applied in every workload: recolor the first element.
pub fn correction() -> Action {
    Action::modify("e0", [("fill", Some("#009e5f"))])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionCost {
    pub elements: usize,
    /// Output tokens to emit the whole corrected document as an answer.
    pub regeneration: u64,
    /// Output tokens to emit the single tool call.
    pub modification: u64,
}

impl CorrectionCost {
    pub fn ratio(&self) -> f64 {
        self.regeneration as f64 / self.modification as f64
    }
}

/// Texts of the two ways to fix one element in an `n`-element document:
/// `(regeneration, modification)`.
pub fn correction_texts(n: usize) -> (String, String) {
    let mut state = DomState::new();
    state
        .apply(&Action::insert(synthetic_svg(n), None))
        .expect("synthetic document is valid");
    let fix = correction();
    state.apply(&fix).expect("e0 exists");
    let doc = state.serialize_node("main_svg").expect("main_svg exists");
    (
        format!("<answer>{doc}</answer>"),
        format!("<tool_call>{}</tool_call>", fix.encode()),
    )
}

pub fn correction_cost(n: usize, counter: &dyn TokenCounter) -> CorrectionCost {
    let (regen, modify) = correction_texts(n);
    CorrectionCost {
        elements: n,
        regeneration: counter.count(&regen),
        modification: counter.count(&modify),
    }
}

/// A scripted episode that builds an `n`-element document and then refines
/// it one element at a time, ending with a short answer.
pub fn convergence_script(n: usize, refinements: usize) -> Vec<String> {
    let mut turns = vec![format!(
        "<think>Lay out all {n} cells first.</think><tool_call>{}</tool_call>",
        Action::insert(synthetic_svg(n), Some("root")).encode()
    )];
    for k in 0..refinements.min(n) {
        let fix = Action::modify(&format!("e{k}"), [("fill", Some("#009e5f"))]);
        turns.push(format!("<think>Fix e{k}.</think><tool_call>{}</tool_call>", fix.encode()));
    }
    turns.push("<answer>main_svg</answer>".into());
    turns
}
