//! Episode-level checks: thought pruning and budget semantics.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slate_core::agent::{
    run_episode, DiffCritic, EpisodeConfig, EpisodeOutcome, EpisodeStatus, NoCritic, ScriptedSolver, Solver,
    SolverError, Task,
};
use slate_core::dom::Action;
use slate_core::protocol::{PromptStyle, RenderedContext, WordPunctCounter};
use slate_core::render::{render, RenderOptions};

use super::trees::{fragment, random_state, IdSource};

/// Random solver that plants a unique sentinel in every thought and records
/// every context it is shown.
pub struct SentinelSolver {
    rng: ChaCha8Rng,
    episode: u64,
    turn: usize,
    ids: IdSource,
    inserted: Vec<String>,
    pub sentinels: Vec<String>,
    pub contexts: Vec<String>,
}

impl SentinelSolver {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            episode: seed,
            turn: 0,
            ids: IdSource::default(),
            inserted: Vec::new(),
            sentinels: Vec::new(),
            contexts: Vec::new(),
        }
    }

    fn tool_call(&mut self) -> String {
        let action = match self.rng.random_range(0..4) {
            0 | 1 => {
                let frag = fragment(&mut self.rng, &mut self.ids);
                let start = frag.find("id=\"").unwrap() + 4;
                let len = frag[start..].find('"').unwrap();
                self.inserted.push(frag[start..start + len].to_owned());
                Action::insert(frag, None)
            }
            2 => match self.inserted.choose(&mut self.rng) {
                Some(id) => Action::modify(id, [("fill", Some("#336699"))]),
                None => Action::delete("missing"),
            },
            _ => match self.inserted.choose(&mut self.rng) {
                Some(id) => Action::delete(&id.clone()),
                None => Action::Clear,
            },
        };
        format!("<tool_call>{}</tool_call>", action.encode())
    }
}

impl Solver for SentinelSolver {
    fn name(&self) -> &str {
        "sentinel"
    }

    fn respond(&mut self, context: &RenderedContext) -> Result<String, SolverError> {
        self.contexts.push(context.text());
        let sentinel = format!("SENTINEL-{}-{}-{:08x}", self.episode, self.turn, self.rng.random::<u32>());
        self.turn += 1;
        self.sentinels.push(sentinel.clone());
        let call = self.tool_call();
        let reply = match self.rng.random_range(0..8) {
            0 => format!("<think>{sentinel}"),
            1 => format!("<think>{sentinel}</think>"),
            2 => format!("<think>a</think>{call}<think>{sentinel} again</think>"),
            3 => format!("<think>{sentinel} <think>nested</think>"),
            4 => format!("<think>{sentinel}</think>{call}<answer>done</answer>"),
            5 => format!("{sentinel} outside any tag {call}"),
            _ => format!("<think>{sentinel}\nplan</think>\n{call}\n{}", self.tool_call()),
        };
        Ok(reply)
    }
}

/// Runs `episodes` random episodes and returns every sentinel found in a
/// later context.
pub fn pruning_leaks(episodes: u64) -> Vec<String> {
    let mut leaks = Vec::new();
    for seed in 0..episodes {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let mut ids = IdSource::default();
        let reference = if rng.random_bool(0.5) {
            let s = random_state(&mut rng, &mut ids, 3);
            Some(render(&s, &RenderOptions::default()).unwrap())
        } else {
            None
        };
        let task = Task {
            instruction: format!("episode {seed}"),
            style: if rng.random_bool(0.5) { PromptStyle::Plain } else { PromptStyle::SvgRevision },
            initial_fragment: rng.random_bool(0.5).then(|| "<svg id='main_svg' width='200' height='100'></svg>".into()),
            reference_image: None,
            original_image: reference,
        };
        let config = EpisodeConfig {
            budget: rng.random_range(2..=8),
            ..EpisodeConfig::default()
        };
        let mut solver = SentinelSolver::new(seed);
        let mut critic = DiffCritic::default();
        run_episode(&task, &mut solver, &mut critic, &WordPunctCounter, &config).expect("episode runs");
        for (t, ctx) in solver.contexts.iter().enumerate() {
            for s in &solver.sentinels[..t] {
                if ctx.contains(s.as_str()) {
                    leaks.push(format!("episode {seed}: {s} visible at step {t}"));
                }
            }
        }
    }
    leaks
}

/// A never-answering scripted episode with the given budget.
pub fn never_answering(budget: u32) -> EpisodeOutcome {
    let turn = format!(
        "<think>still working</think><tool_call>{}</tool_call>",
        Action::modify("main_svg", [("height", Some("120"))]).encode()
    );
    let task = Task {
        instruction: "never finishes".into(),
        style: PromptStyle::Plain,
        initial_fragment: Some("<svg id='main_svg' width='100' height='100'></svg>".into()),
        reference_image: None,
        original_image: None,
    };
    let config = EpisodeConfig {
        budget,
        ..EpisodeConfig::default()
    };
    let mut solver = ScriptedSolver::repeating(vec![turn]);
    run_episode(&task, &mut solver, &mut NoCritic, &WordPunctCounter, &config).expect("episode runs")
}

pub fn budget_holds(budget: u32) -> Result<(), String> {
    let out = never_answering(budget);
    if out.trajectory.len() != budget as usize {
        return Err(format!("budget {budget}: {} steps", out.trajectory.len()));
    }
    if out.status != EpisodeStatus::BudgetExhausted || out.answer.is_some() {
        return Err(format!("budget {budget}: status {:?}", out.status));
    }
    let replayed = slate_core::agent::replay_trajectory(&out.trajectory).map_err(|e| e.to_string())?;
    if replayed.final_state.serialize() != out.final_state.serialize() {
        return Err(format!("budget {budget}: replay diverged"));
    }
    Ok(())
}

