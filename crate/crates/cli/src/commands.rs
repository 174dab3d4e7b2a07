use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use slate_core::agent::{read_jsonl, replay_trajectory, verify_context_digests, TrajectoryStep};
use slate_core::dom::{Action, ApplyError, DocumentError, DomState};
use slate_core::parser::{parse_fragment, validate_fragment};
use slate_core::protocol::WordPunctCounter;
use slate_core::render::{render, RenderOptions};
use slate_core::workload::{correction_cost, WORKLOAD_SIZES};

use crate::error::{exit, CliError};
use crate::run::load_task;

pub fn load_trajectory(path: &Path) -> Result<Vec<TrajectoryStep>, CliError> {
    let file = fs::File::open(path).map_err(CliError::io(path))?;
    read_jsonl(BufReader::new(file)).map_err(|source| CliError::Trajectory {
        path: path.to_owned(),
        source,
    })
}

pub fn cmd_replay(path: &Path, task: Option<&Path>) -> Result<u8, CliError> {
    let steps = load_trajectory(path)?;
    let report = replay_trajectory(&steps)?;
    if let Some(task_path) = task {
        verify_context_digests(&load_task(task_path, None)?, &steps)?;
    }
    println!(
        "ok: {} steps verified{}",
        report.steps,
        if task.is_some() { ", contexts rebuilt" } else { "" }
    );
    Ok(exit::OK)
}

pub struct StatsRequest {
    pub files: Vec<PathBuf>,
    pub csv: Option<PathBuf>,
    pub synthetic: bool,
}

pub fn cmd_stats(req: &StatsRequest) -> Result<u8, CliError> {
    if req.files.is_empty() && !req.synthetic {
        return Err(CliError::Usage("stats needs at least one trajectory file".into()));
    }
    let mut rows = Vec::new();
    for path in &req.files {
        let mut cumulative = 0;
        for step in load_trajectory(path)? {
            cumulative += step.tokens_out.count;
            rows.push((path.display().to_string(), step, cumulative));
        }
    }
    if !req.files.is_empty() {
        println!(
            "{:<40} {:>5} {:>10} {:>10} {:>14}",
            "file", "step", "tokens_in", "tokens_out", "cumulative_out"
        );
        for (file, step, cumulative) in &rows {
            println!(
                "{:<40} {:>5} {:>10} {:>10} {:>14}",
                file, step.index, step.tokens_in.count, step.tokens_out.count, cumulative
            );
        }
    }
    if let Some(csv_path) = &req.csv {
        let mut w = csv::Writer::from_path(csv_path).map_err(|e| CliError::config(csv_path, e.to_string()))?;
        let werr = |e: csv::Error| CliError::config(csv_path, e.to_string());
        w.write_record(["file", "step", "tokens_in", "tokens_out", "cumulative_out", "method"])
            .map_err(werr)?;
        for (file, step, cumulative) in &rows {
            w.write_record([
                file.clone(),
                step.index.to_string(),
                step.tokens_in.count.to_string(),
                step.tokens_out.count.to_string(),
                cumulative.to_string(),
                step.tokens_out.method.clone(),
            ])
            .map_err(werr)?;
        }
        w.flush().map_err(CliError::io(csv_path))?;
    }
    if req.synthetic {
        println!();
        println!("{:>8} {:>13} {:>13} {:>8}", "elements", "regeneration", "modification", "ratio");
        for n in WORKLOAD_SIZES {
            let c = correction_cost(n, &WordPunctCounter);
            println!("{:>8} {:>13} {:>13} {:>8.1}", n, c.regeneration, c.modification, c.ratio());
        }
    }
    Ok(exit::OK)
}

fn fragment_error(e: ApplyError) -> CliError {
    match e {
        ApplyError::InvalidFragment(d) | ApplyError::DuplicateId { diagnostic: d, .. } => CliError::InvalidFragment(d),
        other => CliError::Usage(other.to_string()),
    }
}

/// Loads a canonical document, or a bare fragment mounted on an empty body.
pub fn load_snapshot(path: &Path, canvas_width: u32) -> Result<DomState, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    match DomState::parse_document(&text, f64::from(canvas_width)) {
        Ok(s) => Ok(s),
        Err(DocumentError::Body(d)) => Err(CliError::InvalidFragment(d)),
        Err(DocumentError::Boilerplate) => {
            let mut s = DomState::with_canvas_width(f64::from(canvas_width));
            if !text.trim().is_empty() {
                s.apply(&Action::insert(text, None)).map_err(fragment_error)?;
            }
            Ok(s)
        }
    }
}

pub fn cmd_render(snapshot: &Path, out: &Path, canvas_width: u32) -> Result<u8, CliError> {
    let state = load_snapshot(snapshot, canvas_width)?;
    let opts = RenderOptions {
        canvas_width,
        ..RenderOptions::default()
    };
    let img = render(&state, &opts).map_err(|e| CliError::config(snapshot, e.to_string()))?;
    let png = img.to_png().map_err(|e| CliError::config(out, e.to_string()))?;
    fs::write(out, png).map_err(CliError::io(out))?;
    println!("wrote {}x{} {}", img.width(), img.height(), out.display());
    Ok(exit::OK)
}

pub fn cmd_validate(path: &Path, canvas_width: u32) -> Result<u8, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let frag = parse_fragment(&text).map_err(CliError::InvalidFragment)?;
    validate_fragment(&frag, &DomState::with_canvas_width(f64::from(canvas_width)), None)
        .map_err(CliError::InvalidFragment)?;
    let ids: Vec<&str> = frag.ids_in_order().into_iter().map(|id| id.as_str()).collect();
    println!("ok: {} top-level element(s); ids: {}", frag.roots.len(), ids.join(", "));
    Ok(exit::OK)
}
