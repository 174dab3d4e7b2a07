//! Actions that must be rejected, against a fixed populated state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slate_core::dom::{Action, DomState};

/// The state every corpus action is applied to.
pub fn base_state() -> DomState {
    let mut s = DomState::new();
    for f in [
        r##"<svg id="main_svg" viewBox="0 0 300 600"><rect id="bar1" x="20" y="20" width="70" height="450" fill="#a629a6"/><g id="grp"><circle id="dot" cx="5" cy="5" r="3"/></g></svg>"##,
        "<div id='analysis'>notes <strong id='hot'>here</strong> tail<ul id='list'><li id='i1'>a</li></ul></div>",
    ] {
        s.apply(&Action::insert(f, None)).unwrap();
    }
    s
}

const MALFORMED: &[&str] = &[
    "",
    "   ",
    "plain text",
    "hello <rect id='t1'/>",
    "<rect id='t1'/> trailing",
    "<rect x='1'/>",
    "<div>no id</div>",
    "<div id='t1'>",
    "<div id='t1'><span>x</div>",
    "<div id='t1'></span>",
    "</div>",
    "<div id='t1'></div></div>",
    "<script id='t1'></script>",
    "<p id='t1'>para</p>",
    "<img id='t1'/>",
    "<DIV id='t1'></DIV>",
    "<foreignObject id='t1'></foreignObject>",
    "<rect id='t1' x='ten'/>",
    "<rect id='t1' x='1' x='2'/>",
    "<rect id='t1' width='NaN'/>",
    "<rect id='t1' width='inf'/>",
    "<rect id='t1' height='1e999'/>",
    "<rect id='t1' width='900'/>",
    "<svg id='t1' width='501'></svg>",
    "<path id='t1' d='Q'/>",
    "<path id='t1' d='M 0'/>",
    "<polygon id='t1' points='1,2,3'/>",
    "<svg id='t1' viewBox='0 0 -1 5'></svg>",
    "<svg id='t1' viewBox='a b c d'></svg>",
    "<rect id='a b'/>",
    "<rect id=''/>",
    "<rect id='t<1'/>",
    "<rect id='t1'x='1'/>",
    "<rect id='t1' x=/>",
    "<rect id='t1",
    "<rect id='t1' fill=\"red'/>",
    "<rect id='t1' 1x='2'/>",
    "<!-- c --><rect id='t1'/>",
    "<![CDATA[x]]><rect id='t1'/>",
    "<?xml version='1.0'?><rect id='t1'/>",
    "<div id='t1'>1 < 2</div>",
    "<div id='t1'><span id='t2'/><span id='t2'/></div>",
    "<rect id='t1'/><rect id='t1'/>",
    "<rect id='root'/>",
    "<div id='t1'><rect id='root'/></div>",
    "<rect id='bar1'/>",
    "<rect id='main_svg'/>",
    "<g id='t1'><circle id='dot'/></g>",
    "<div id='t1'><li id='i1'>dup</li></div>",
    "<div id='hot'></div>",
    "<rect id='t1'/><div id='analysis'/>",
    "<",
    ">",
    "<>",
    "< rect id='t1'/>",
    "<rect id='t1' / >x",
    "<rect id='t1'></rect",
    "<div id='t1'><div><div><div></div></div></div>",
];

/// Deterministic corpus of rejected actions: hand-written cases, every
/// malformed fragment used through each fragment-taking action, and seeded
/// truncations of valid markup.
pub fn corpus() -> Vec<(String, Action)> {
    let mut out = Vec::new();
    for f in MALFORMED {
        out.push((format!("insert {f:?}"), Action::insert(*f, None)));
        out.push((format!("insert under grp {f:?}"), Action::insert(*f, Some("grp"))));
        // Replacing keeps the target's own ids legal, so skip the ones that only
        // collide with bar1 when bar1 is the target.
        if !f.contains("'bar1'") {
            out.push((format!("replace bar1 {f:?}"), Action::replace("bar1", *f)));
        }
    }
    let deep = format!("{}{}", "<g>".repeat(70), "</g>".repeat(70));
    out.push(("too deep".into(), Action::insert(format!("<svg id='t1'>{deep}</svg>"), None)));
    let valid = "<svg id='v1' width='100' height='50'><rect id='v2' x='1' y='1' width='5' height='5'/><text id='v3' x='1' y='9'>hi</text></svg>";
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..40 {
        let cut = rng.random_range(1..valid.len() - 1);
        out.push((format!("truncated at {cut}"), Action::insert(&valid[..cut], None)));
    }
    let structural = [
        ("unknown root", Action::insert("<rect id='t1'/>", Some("nope"))),
        ("unknown anchor", {
            let mut a = Action::insert("<rect id='t1'/>", Some("grp"));
            if let Action::Insert { before_id, .. } = &mut a {
                *before_id = Some(slate_core::dom::NodeId::new("nope").unwrap());
            }
            a
        }),
        ("anchor under another parent", {
            let mut a = Action::insert("<rect id='t1'/>", Some("grp"));
            if let Action::Insert { before_id, .. } = &mut a {
                *before_id = Some(slate_core::dom::NodeId::new("bar1").unwrap());
            }
            a
        }),
        ("modify unknown", Action::modify("nope", [("x", Some("1"))])),
        ("modify root", Action::modify("root", [("x", Some("1"))])),
        ("modify id", Action::modify("bar1", [("id", Some("bar9"))])),
        ("modify bad number", Action::modify("bar1", [("x", Some("left"))])),
        ("modify bad second attr", Action::modify("bar1", [("fill", Some("red")), ("height", Some("tall"))])),
        ("modify oversize", Action::modify("bar1", [("width", Some("501"))])),
        ("modify bad name", Action::modify("bar1", [("9x", Some("1"))])),
        ("modify remove bad name", Action::modify("bar1", [("a b", None)])),
        ("modify bad path", Action::modify("bar1", [("d", Some("Z Z Z 1"))])),
        ("replace unknown", Action::replace("nope", "<rect id='t1'/>")),
        ("replace root", Action::replace("root", "<rect id='t1'/>")),
        ("replace collides with sibling", Action::replace("bar1", "<rect id='dot'/>")),
        ("replace collides elsewhere", Action::replace("grp", "<g id='g2'><rect id='i1'/></g>")),
        ("delete unknown", Action::delete("nope")),
        ("delete root", Action::delete("root")),
    ];
    out.extend(structural.into_iter().map(|(n, a)| (n.to_owned(), a)));
    out
}

/// Applies every corpus action; returns failures as messages.
pub fn check_atomicity() -> (usize, Vec<String>) {
    let base = base_state();
    let before = base.serialize();
    let mut failures = Vec::new();
    let cases = corpus();
    for (name, action) in &cases {
        let mut s = base.clone();
        match s.apply(action) {
            Ok(_) => failures.push(format!("{name}: accepted")),
            Err(_) if s.serialize() != before => failures.push(format!("{name}: state changed after rejection")),
            Err(_) if s.revision() != base.revision() => failures.push(format!("{name}: revision moved")),
            Err(_) => {
                if let Err(e) = s.check_consistency() {
                    failures.push(format!("{name}: {e}"));
                }
            }
        }
    }
    (cases.len(), failures)
}
