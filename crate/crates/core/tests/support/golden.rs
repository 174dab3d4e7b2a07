//! Render fixtures and their committed golden PNGs.

use std::fs;
use std::path::{Path, PathBuf};

use slate_core::dom::{Action, DomState};
use slate_core::render::{render, RenderOptions};

pub fn fixture_dir() -> PathBuf {
    super::repo_root().join("fixtures/render")
}

/// `(name, fragment text)` for every `*.frag`, sorted by name.
pub fn fixtures() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(fixture_dir())
        .expect("render fixtures")
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "frag").then(|| {
                let name = path.file_stem().unwrap().to_string_lossy().into_owned();
                (name, fs::read_to_string(&path).unwrap())
            })
        })
        .collect();
    out.sort();
    out
}

pub fn state_for(fragment: &str) -> DomState {
    let mut s = DomState::new();
    if !fragment.trim().is_empty() {
        s.apply(&Action::insert(fragment.trim_end(), None)).expect("fixture fragment is valid");
    }
    s
}

pub fn render_png(state: &DomState) -> Vec<u8> {
    render(state, &RenderOptions::default()).unwrap().to_png().unwrap()
}

/// Renders each fixture `repeats` times; returns `(fixtures checked,
/// failures)`. With `SLATE_BLESS=1` the goldens are rewritten instead.
pub fn check_goldens(repeats: usize) -> (usize, Vec<String>) {
    let bless = std::env::var("SLATE_BLESS").is_ok_and(|v| v == "1");
    let fixtures = fixtures();
    let mut failures = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = fixtures
            .iter()
            .map(|(name, frag)| {
                scope.spawn(move || {
                    let state = state_for(frag);
                    let first = render_png(&state);
                    let mut errs = Vec::new();
                    for i in 1..repeats {
                        if render_png(&state) != first {
                            errs.push(format!("{name}: render {i} differs from render 0"));
                            break;
                        }
                    }
                    let golden: &Path = &fixture_dir().join(format!("{name}.png"));
                    if bless {
                        fs::write(golden, &first).unwrap();
                    } else {
                        match fs::read(golden) {
                            Ok(bytes) if bytes == first => {}
                            Ok(_) => errs.push(format!("{name}: differs from golden")),
                            Err(e) => errs.push(format!("{name}: golden missing ({e})")),
                        }
                    }
                    errs
                })
            })
            .collect();
        for h in handles {
            failures.extend(h.join().unwrap());
        }
    });
    (fixtures.len(), failures)
}
