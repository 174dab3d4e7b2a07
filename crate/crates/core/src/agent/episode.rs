use serde::{Deserialize, Serialize};
use tracing::{debug, info, warn};

use crate::dom::{Action, ApplyError, DomState};
use crate::protocol::{
    build_context, decode_tool_call, parse_turn, ActionRecord, CritiqueReport, PromptStyle, TokenCounter, Turn,
};
use crate::render::{render_with_layout, ImageError, LayoutBox, RasterImage, RenderError, RenderOptions};
use crate::sha256_hex;

use super::critic::{Critic, CritiqueInput};
use super::solver::Solver;
use super::trajectory::TrajectoryStep;

pub const DEFAULT_BUDGET: u32 = 6;
pub const DEFAULT_MAX_ACTIONS_PER_TURN: usize = 8;

/// What the agent is asked to do.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Task {
    pub instruction: String,
    #[serde(default)]
    pub style: PromptStyle,
    /// Markup inserted under the body before the first turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_fragment: Option<String>,
    /// Path of the reference PNG, relative to the task file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_image: Option<String>,
    #[serde(skip)]
    pub original_image: Option<RasterImage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct EpisodeConfig {
    /// Maximum number of solver turns.
    pub budget: u32,
    pub max_actions_per_turn: usize,
    pub canvas_width: u32,
    /// Sampling temperature passed to external backends.
    pub temperature: f64,
    pub critic: String,
    pub token_counter: String,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            max_actions_per_turn: DEFAULT_MAX_ACTIONS_PER_TURN,
            canvas_width: RenderOptions::default().canvas_width,
            temperature: 0.0,
            critic: "diff".into(),
            token_counter: "word-punct".into(),
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), EpisodeError> {
        let fail = |m: &str| Err(EpisodeError::InvalidConfig(m.to_owned()));
        if self.budget == 0 {
            return fail("budget must be at least 1");
        }
        if self.max_actions_per_turn == 0 {
            return fail("maxActionsPerTurn must be at least 1");
        }
        if self.canvas_width == 0 {
            return fail("canvasWidth must be positive");
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return fail("temperature must be a non-negative number");
        }
        Ok(())
    }

    pub fn render_options(&self) -> RenderOptions {
        RenderOptions {
            canvas_width: self.canvas_width,
            ..RenderOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum EpisodeStatus {
    Answered,
    BudgetExhausted,
    SolverFailure { message: String },
}

#[derive(Debug, thiserror::Error)]
pub enum EpisodeError {
    #[error("invalid episode config: {0}")]
    InvalidConfig(String),
    #[error("task setup rejected: {0}")]
    InvalidTask(ApplyError),
    #[error("render failed at step {step:?}: {source}")]
    Render {
        step: Option<usize>,
        #[source]
        source: RenderError,
    },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub status: EpisodeStatus,
    pub answer: Option<String>,
    pub trajectory: Vec<TrajectoryStep>,
    pub final_state: DomState,
    /// Render after each step, aligned with `trajectory`.
    pub step_images: Vec<RasterImage>,
}

/// First answer region of a turn.
pub fn extract_answer(turn: &Turn) -> Option<&str> {
    if turn.answers.len() > 1 {
        warn!(count = turn.answers.len(), "turn has several answers; using the first");
    }
    turn.answer()
}

fn record_outcome(state: &mut DomState, action: Option<Action>, payload: String, step: Option<usize>) -> ActionRecord {
    let (accepted, diagnostic) = match &action {
        Some(a) => match state.apply(a) {
            Ok(_) => (true, None),
            Err(e) => (false, Some(format!("{}: {e}", e.kind()))),
        },
        None => (false, None),
    };
    ActionRecord {
        revision: state.revision(),
        action,
        payload,
        accepted,
        diagnostic,
        step,
    }
}

/// Applies the task's initial fragment to a fresh state.
pub fn setup_state(task: &Task, config: &EpisodeConfig) -> Result<(DomState, Vec<ActionRecord>), EpisodeError> {
    let mut state = DomState::with_canvas_width(f64::from(config.canvas_width));
    let mut setup = Vec::new();
    if let Some(fragment) = &task.initial_fragment {
        let action = Action::insert(fragment.clone(), None);
        state.apply(&action).map_err(EpisodeError::InvalidTask)?;
        setup.push(ActionRecord {
            revision: state.revision(),
            payload: action.encode(),
            action: Some(action),
            accepted: true,
            diagnostic: None,
            step: None,
        });
    }
    Ok((state, setup))
}

struct Snapshot {
    image: RasterImage,
    layout: Vec<LayoutBox>,
    png_digest: String,
}

fn snapshot(state: &DomState, opts: &RenderOptions, step: Option<usize>) -> Result<Snapshot, EpisodeError> {
    let r = render_with_layout(state, opts).map_err(|source| EpisodeError::Render { step, source })?;
    let png_digest = sha256_hex(r.image.to_png()?);
    Ok(Snapshot {
        image: r.image,
        layout: r.layout,
        png_digest,
    })
}

/// Runs the solver/critic loop until an answer or the budget runs out.
pub fn run_episode(
    task: &Task,
    solver: &mut dyn Solver,
    critic: &mut dyn Critic,
    counter: &dyn TokenCounter,
    config: &EpisodeConfig,
) -> Result<EpisodeOutcome, EpisodeError> {
    config.validate()?;
    let opts = config.render_options();
    let (mut state, mut setup) = setup_state(task, config)?;
    let mut history = setup.clone();
    let mut current = snapshot(&state, &opts, None)?;
    let mut critique: Option<CritiqueReport> = None;
    let mut protocol_error: Option<String> = None;
    let mut trajectory = Vec::new();
    let mut step_images = Vec::new();
    let mut status = EpisodeStatus::BudgetExhausted;
    let mut answer = None;

    for step in 0..config.budget as usize {
        let context = build_context(
            step,
            &task.instruction,
            task.style,
            task.original_image.as_ref(),
            &history,
            &state,
            &current.image,
            critique.as_ref(),
            protocol_error.as_deref(),
        )
        .render()?;
        let tokens_in = counter.measure(&context.text());
        let response = match solver.respond(&context) {
            Ok(r) => r,
            Err(e) => {
                warn!(step, solver = solver.name(), error = %e, "solver failed");
                status = EpisodeStatus::SolverFailure { message: e.message };
                break;
            }
        };
        let tokens_out = counter.measure(&response);

        let mut actions = Vec::new();
        let mut turn_error = None;
        let turn = match parse_turn(&response) {
            Ok(t) => Some(t),
            Err(e) => {
                warn!(step, error = %e, "unparseable turn");
                turn_error = Some(format!("{}: {e}", e.kind()));
                None
            }
        };
        if let Some(turn) = &turn {
            for (i, payload) in turn.tool_calls.iter().enumerate() {
                let record = if i >= config.max_actions_per_turn {
                    ActionRecord {
                        revision: state.revision(),
                        action: decode_tool_call(payload).ok(),
                        payload: payload.clone(),
                        accepted: false,
                        diagnostic: Some(format!(
                            "TooManyActions: only {} tool calls are executed per turn",
                            config.max_actions_per_turn
                        )),
                        step: Some(step),
                    }
                } else {
                    match decode_tool_call(payload) {
                        Ok(a) => record_outcome(&mut state, Some(a), payload.clone(), Some(step)),
                        Err(e) => ActionRecord {
                            diagnostic: Some(format!("{}: {e}", e.kind())),
                            ..record_outcome(&mut state, None, payload.clone(), Some(step))
                        },
                    }
                };
                debug!(step, accepted = record.accepted, diagnostic = ?record.diagnostic, "tool call");
                actions.push(record);
            }
        }
        history.extend(actions.iter().cloned());
        current = snapshot(&state, &opts, Some(step))?;

        let step_answer = turn.as_ref().and_then(extract_answer).map(str::to_owned);
        critique = match (&turn, &step_answer) {
            (Some(_), None) => {
                let input = CritiqueInput {
                    instruction: &task.instruction,
                    original: task.original_image.as_ref(),
                    render: &current.image,
                    layout: &current.layout,
                };
                match critic.critique(&input) {
                    Ok(c) => c,
                    Err(e) => {
                        status = EpisodeStatus::SolverFailure {
                            message: format!("critic {}: {e}", critic.name()),
                        };
                        None
                    }
                }
            }
            _ => None,
        };

        info!(step, actions = actions.len(), answered = step_answer.is_some(), "step done");
        trajectory.push(TrajectoryStep {
            index: step,
            context_digest: context.digest,
            response,
            turn,
            protocol_error: turn_error.clone(),
            actions,
            state_snapshot: state.serialize(),
            render_digest: current.png_digest.clone(),
            critique: critique.clone(),
            tokens_in,
            tokens_out,
            setup: std::mem::take(&mut setup),
            render_options: opts,
        });
        step_images.push(current.image.clone());
        protocol_error = turn_error;

        if matches!(status, EpisodeStatus::SolverFailure { .. }) {
            break;
        }
        if step_answer.is_some() {
            status = EpisodeStatus::Answered;
            answer = step_answer;
            break;
        }
    }

    Ok(EpisodeOutcome {
        status,
        answer,
        trajectory,
        final_state: state,
        step_images,
    })
}
