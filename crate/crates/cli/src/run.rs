use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use slate_core::agent::{
    run_episode, write_jsonl, EpisodeOutcome, EpisodeStatus, RecordingSolver, Registry, Solver, Task,
};
use slate_core::render::RasterImage;
use tracing::info;

use crate::config::ResolvedConfig;
use crate::error::{exit, CliError};

pub struct RunRequest {
    pub tasks: Vec<PathBuf>,
    pub image: Option<PathBuf>,
    pub record_cassette: Option<PathBuf>,
}

pub fn load_task(path: &Path, image_override: Option<&Path>) -> Result<Task, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut task: Task = serde_json::from_str(&text)
        .map_err(|e| CliError::config(path, format!("line {}: {e}", e.line())))?;
    let image = match image_override {
        Some(p) => Some(p.to_owned()),
        None => task
            .reference_image
            .as_ref()
            .map(|r| path.parent().unwrap_or(Path::new(".")).join(r)),
    };
    if let Some(p) = image {
        let bytes = fs::read(&p).map_err(CliError::io(&p))?;
        task.original_image = Some(RasterImage::from_png(&bytes).map_err(|e| CliError::config(&p, e.to_string()))?);
    }
    Ok(task)
}

pub fn status_code(status: &EpisodeStatus) -> u8 {
    match status {
        EpisodeStatus::Answered => exit::OK,
        EpisodeStatus::BudgetExhausted => exit::BUDGET_EXHAUSTED,
        EpisodeStatus::SolverFailure { .. } => exit::SOLVER_FAILURE,
    }
}

fn status_label(status: &EpisodeStatus) -> String {
    match status {
        EpisodeStatus::Answered => "answered".into(),
        EpisodeStatus::BudgetExhausted => "budget-exhausted".into(),
        EpisodeStatus::SolverFailure { message } => format!("solver-failure: {message}"),
    }
}

pub fn summary(outcome: &EpisodeOutcome) -> String {
    let tokens_in: u64 = outcome.trajectory.iter().map(|s| s.tokens_in.count).sum();
    let tokens_out: u64 = outcome.trajectory.iter().map(|s| s.tokens_out.count).sum();
    let method = outcome
        .trajectory
        .first()
        .map_or("-", |s| s.tokens_out.method.as_str());
    let mut out = format!(
        "status: {}\nsteps: {}\ntokens_in: {tokens_in}\ntokens_out: {tokens_out}\ntoken_method: {method}\n",
        status_label(&outcome.status),
        outcome.trajectory.len()
    );
    match &outcome.answer {
        Some(a) => {
            out.push_str("answer:\n");
            out.push_str(a.trim());
            out.push('\n');
        }
        None => out.push_str("answer: (none)\n"),
    }
    out
}

fn write_outputs(dir: &Path, outcome: &EpisodeOutcome, config: &ResolvedConfig) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join("trajectory.jsonl");
    let file = fs::File::create(&path).map_err(CliError::io(&path))?;
    write_jsonl(&outcome.trajectory, BufWriter::new(file)).map_err(CliError::io(&path))?;
    let path = dir.join("final.html");
    fs::write(&path, outcome.final_state.serialize()).map_err(CliError::io(&path))?;
    for (k, img) in outcome.step_images.iter().enumerate() {
        let path = dir.join(format!("step_{k}.png"));
        let png = img.to_png().map_err(|e| CliError::config(&path, e.to_string()))?;
        fs::write(&path, png).map_err(CliError::io(&path))?;
    }
    let path = dir.join("summary.txt");
    fs::write(&path, summary(outcome)).map_err(CliError::io(&path))?;
    let path = dir.join("config.json");
    let resolved = serde_json::to_string_pretty(&config.redacted()).expect("json value serializes");
    fs::write(&path, resolved + "\n").map_err(CliError::io(&path))?;
    Ok(())
}

/// Runs one task into `dir` and returns its exit code.
fn run_one(
    registry: &Registry,
    config: &ResolvedConfig,
    task_path: &Path,
    image: Option<&Path>,
    dir: &Path,
    record: Option<&Path>,
) -> Result<u8, CliError> {
    let task = load_task(task_path, image)?;
    let solver = registry.solver(&config.solver_kind, &config.solver_settings)?;
    let mut critic = registry.critic(&config.episode.critic, &config.critic_settings)?;
    let counter = registry.counter(&config.episode.token_counter)?;

    let outcome = match record {
        Some(tape_path) => {
            let (mut recorder, tape) = RecordingSolver::new(solver);
            let outcome = run_episode(&task, &mut recorder, &mut critic, counter.as_ref(), &config.episode)?;
            let json = tape.lock().expect("cassette lock").to_json();
            fs::write(tape_path, json).map_err(CliError::io(tape_path))?;
            outcome
        }
        None => {
            let mut solver: Box<dyn Solver> = solver;
            run_episode(&task, &mut solver, &mut critic, counter.as_ref(), &config.episode)?
        }
    };
    write_outputs(dir, &outcome, config)?;
    info!(task = %task_path.display(), status = ?outcome.status, steps = outcome.trajectory.len(), "episode finished");
    println!(
        "{}: {} in {} steps -> {}",
        task_path.display(),
        status_label(&outcome.status),
        outcome.trajectory.len(),
        dir.display()
    );
    Ok(status_code(&outcome.status))
}

/// Runs every task; several tasks go to per-task subdirectories and may run
/// in parallel. Returns the first nonzero exit code in task order.
pub fn cmd_run(registry: &Registry, config: &ResolvedConfig, req: &RunRequest) -> Result<u8, CliError> {
    if req.tasks.is_empty() {
        return Err(CliError::Usage("run needs at least one --task".into()));
    }
    for t in &req.tasks {
        if !t.is_file() {
            return Err(CliError::Usage(format!("task file {} does not exist", t.display())));
        }
    }
    info!(config = %config.redacted(), "resolved configuration");
    if req.tasks.len() == 1 {
        return run_one(
            registry,
            config,
            &req.tasks[0],
            req.image.as_deref(),
            &config.out,
            req.record_cassette.as_deref(),
        );
    }
    if req.record_cassette.is_some() || req.image.is_some() {
        return Err(CliError::Usage(
            "--record-cassette and --image apply to a single --task".into(),
        ));
    }
    let dirs: Vec<PathBuf> = req
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let stem = t.file_stem().map_or_else(|| "task".into(), |s| s.to_string_lossy().into_owned());
            config.out.join(format!("{i:02}_{stem}"))
        })
        .collect();
    let results: Mutex<Vec<Option<Result<u8, CliError>>>> = Mutex::new((0..req.tasks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..config.jobs.min(req.tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= req.tasks.len() {
                    break;
                }
                let r = run_one(registry, config, &req.tasks[i], None, &dirs[i], None);
                results.lock().expect("results lock")[i] = Some(r);
            });
        }
    });
    let mut code = exit::OK;
    for r in results.into_inner().expect("results lock").into_iter().flatten() {
        let c = match r {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        };
        if code == exit::OK {
            code = c;
        }
    }
    Ok(code)
}
