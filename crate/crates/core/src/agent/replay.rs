use crate::dom::DomState;
use crate::protocol::{build_context, ActionRecord};
use crate::render::{render, ImageError, RenderError};
use crate::sha256_hex;

use super::episode::Task;
use super::trajectory::TrajectoryStep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigestKind {
    Snapshot,
    Render,
    Context,
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("trajectory has no steps")]
    Empty,
    #[error("step {step}: {kind:?} digest mismatch, logged {expected}, replayed {actual}")]
    DigestMismatch {
        step: usize,
        kind: DigestKind,
        expected: String,
        actual: String,
    },
    #[error("step {step}: action {index} was logged as {logged} but replays as {replayed}")]
    AcceptanceMismatch {
        step: usize,
        index: usize,
        logged: &'static str,
        replayed: &'static str,
    },
    #[error("step {step}: {source}")]
    Render {
        step: usize,
        #[source]
        source: RenderError,
    },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub steps: usize,
    pub final_state: DomState,
}

fn verdict(accepted: bool) -> &'static str {
    if accepted {
        "accepted"
    } else {
        "rejected"
    }
}

fn reapply(state: &mut DomState, records: &[ActionRecord], step: usize) -> Result<(), ReplayError> {
    for (index, record) in records.iter().enumerate() {
        let replayed = match &record.action {
            Some(a) if record.accepted => state.apply(a).is_ok(),
            // Calls cut off by the per-turn limit were never attempted.
            Some(a) if !is_truncated(record) => state.applied(a).is_ok(),
            _ => false,
        };
        if replayed != record.accepted {
            return Err(ReplayError::AcceptanceMismatch {
                step,
                index,
                logged: verdict(record.accepted),
                replayed: verdict(replayed),
            });
        }
    }
    Ok(())
}

fn is_truncated(record: &ActionRecord) -> bool {
    record.diagnostic.as_deref().is_some_and(|d| d.starts_with("TooManyActions"))
}

/// Re-applies every logged action from a fresh state and checks each step's
/// snapshot and render digest.
pub fn replay_trajectory(steps: &[TrajectoryStep]) -> Result<ReplayReport, ReplayError> {
    let first = steps.first().ok_or(ReplayError::Empty)?;
    let mut state = DomState::with_canvas_width(f64::from(first.render_options.canvas_width));
    for step in steps {
        reapply(&mut state, &step.setup, step.index)?;
        reapply(&mut state, &step.actions, step.index)?;
        let snapshot = state.serialize();
        if snapshot != step.state_snapshot {
            return Err(ReplayError::DigestMismatch {
                step: step.index,
                kind: DigestKind::Snapshot,
                expected: sha256_hex(&step.state_snapshot),
                actual: sha256_hex(&snapshot),
            });
        }
        let png = render(&state, &step.render_options)
            .map_err(|source| ReplayError::Render {
                step: step.index,
                source,
            })?
            .to_png()?;
        let digest = sha256_hex(png);
        if digest != step.render_digest {
            return Err(ReplayError::DigestMismatch {
                step: step.index,
                kind: DigestKind::Render,
                expected: step.render_digest.clone(),
                actual: digest,
            });
        }
    }
    Ok(ReplayReport {
        steps: steps.len(),
        final_state: state,
    })
}

/// Rebuilds every step's context from the log alone and checks its digest.
/// Only the task, the action history, the render and the previous critique
/// feed into the rebuilt context.
pub fn verify_context_digests(task: &Task, steps: &[TrajectoryStep]) -> Result<(), ReplayError> {
    let first = steps.first().ok_or(ReplayError::Empty)?;
    let opts = first.render_options;
    let mut state = DomState::with_canvas_width(f64::from(opts.canvas_width));
    let mut history: Vec<ActionRecord> = Vec::new();
    let mut previous: Option<&TrajectoryStep> = None;
    for step in steps {
        reapply(&mut state, &step.setup, step.index)?;
        history.extend(step.setup.iter().cloned());
        let image = render(&state, &opts).map_err(|source| ReplayError::Render {
            step: step.index,
            source,
        })?;
        let digest = build_context(
            step.index,
            &task.instruction,
            task.style,
            task.original_image.as_ref(),
            &history,
            &state,
            &image,
            previous.and_then(|p| p.critique.as_ref()),
            previous.and_then(|p| p.protocol_error.as_deref()),
        )
        .render()?
        .digest;
        if digest != step.context_digest {
            return Err(ReplayError::DigestMismatch {
                step: step.index,
                kind: DigestKind::Context,
                expected: step.context_digest.clone(),
                actual: digest,
            });
        }
        reapply(&mut state, &step.actions, step.index)?;
        history.extend(step.actions.iter().cloned());
        previous = Some(step);
    }
    Ok(())
}
