//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slate_core::agent::{read_jsonl, EpisodeStatus};
use slate_core::dom::DomState;
use slate_core::parser::DEFAULT_CANVAS_WIDTH;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn crud_oracle() -> Verdict {
    let start = Instant::now();
    let failures = support::oracle::run_seeds(1000, 200);
    let elapsed = start.elapsed();
    if let Some((seed, e)) = failures.first() {
        return Err(format!("{} mismatching seeds; first {seed}: {e}", failures.len()));
    }
    if elapsed.as_secs_f64() >= 30.0 {
        return Err(format!("1000 x 200 actions took {elapsed:.1?}"));
    }
    Ok(format!("1000 sequences of 200 actions, 0 mismatches, {elapsed:.1?}"))
}

fn atomicity() -> Verdict {
    let (count, failures) = support::corpus::check_atomicity();
    if count < 200 {
        return Err(format!("corpus has {count} cases"));
    }
    match failures.first() {
        Some(f) => Err(format!("{} of {count} failed; first: {f}", failures.len())),
        None => Ok(format!("{count} rejected actions left the state byte-identical")),
    }
}

fn replace_position() -> Verdict {
    const CASES: u64 = 10_000;
    for seed in 0..CASES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        support::trees::replace_keeps_position(&mut rng).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!("{CASES} random replacements kept their sibling index"))
}

fn render_determinism() -> Verdict {
    let (count, failures) = support::golden::check_goldens(100);
    if count != 20 {
        return Err(format!("expected 20 fixtures, found {count}"));
    }
    match failures.first() {
        Some(f) => Err(format!("{} failures; first: {f}", failures.len())),
        None => Ok("20 fixtures x 100 renders, all equal to their goldens".into()),
    }
}

fn bar_chart_replay() -> Verdict {
    let dir = support::bar_chart::dir();
    let trajectory = dir.join("trajectory.jsonl");
    let status = Command::new(env!("CARGO_BIN_EXE_slate"))
        .arg("replay")
        .arg(&trajectory)
        .arg("--task")
        .arg(dir.join("task.json"))
        .env("RUST_LOG", "off")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!(
            "replay exited {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr).trim()
        ));
    }

    let file = std::fs::File::open(&trajectory).map_err(|e| e.to_string())?;
    let steps = read_jsonl(std::io::BufReader::new(file)).map_err(|e| e.to_string())?;
    let tools: Vec<Vec<&str>> = steps
        .iter()
        .map(|s| s.actions.iter().filter_map(|a| a.action.as_ref().map(|x| x.tool_name())).collect())
        .collect();
    let expected = [vec!["insert_element"], vec!["replace_element"], vec!["remove_element"]];
    if tools != expected {
        return Err(format!("tool sequence {tools:?}"));
    }
    let last = steps.last().ok_or("empty trajectory")?;
    let state = DomState::parse_document(&last.state_snapshot, DEFAULT_CANVAS_WIDTH).map_err(|e| e.to_string())?;
    let bar1 = state.lookup("bar1").ok_or("bar1 missing from the final state")?;
    for (name, value) in support::bar_chart::BAR1 {
        if bar1.attr(name) != Some(value) {
            return Err(format!("bar1 {name} = {:?}, expected {value}", bar1.attr(name)));
        }
    }
    Ok("insert analysis, replace main_svg, remove analysis; bar1 corrected; replay exit 0".into())
}

fn pruning() -> Verdict {
    let leaks = support::episodes::pruning_leaks(100);
    match leaks.first() {
        Some(l) => Err(format!("{} leaks; first: {l}", leaks.len())),
        None => Ok("100 episodes, 0 sentinel leaks".into()),
    }
}

fn token_trend() -> Verdict {
    let costs = support::workload::check_trend()?;
    let summary: Vec<String> = costs
        .iter()
        .map(|c| format!("N={} {}/{}", c.elements, c.regeneration, c.modification))
        .collect();
    Ok(format!("regeneration/modification: {}", summary.join(", ")))
}

fn budgets() -> Verdict {
    for b in [1, 6] {
        support::episodes::budget_holds(b)?;
        let out = support::episodes::never_answering(b);
        if out.status != EpisodeStatus::BudgetExhausted || out.trajectory.len() != b as usize {
            return Err(format!("budget {b}: {:?} after {} steps", out.status, out.trajectory.len()));
        }
    }
    Ok("budgets 1 and 6 give exactly that many steps and BudgetExhausted".into())
}

fn scope_statement() -> Verdict {
    let readme = std::fs::read_to_string(support::repo_root().join("README.md")).map_err(|e| e.to_string())?;
    let lower = readme.to_lowercase();
    let stated = lower.lines().any(|l| l.contains("benchmark") && l.contains("out of scope"));
    if stated && lower.contains("property suites") {
        Ok("README marks benchmark scores out of scope and names the substitute suites".into())
    } else {
        Err("README lacks the out-of-scope statement".into())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("CRUD oracle equivalence", crud_oracle),
        ("atomicity", atomicity),
        ("replace position", replace_position),
        ("render determinism", render_determinism),
        ("bar chart replay", bar_chart_replay),
        ("context pruning", pruning),
        ("token trend", token_trend),
        ("budget semantics", budgets),
        ("scope statement", scope_statement),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
