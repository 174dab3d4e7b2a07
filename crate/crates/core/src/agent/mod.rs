//! The episode orchestrator: solver and critic strategies, the turn loop,
//! trajectory logging and replay.

mod critic;
mod episode;
mod registry;
mod replay;
mod solver;
mod trajectory;

pub use critic::{Critic, CriticError, CritiqueInput, DiffCritic, DiffCriticOptions, NoCritic};
pub use episode::{
    extract_answer, run_episode, setup_state, EpisodeConfig, EpisodeError, EpisodeOutcome, EpisodeStatus, Task,
    DEFAULT_BUDGET, DEFAULT_MAX_ACTIONS_PER_TURN,
};
pub use registry::{CriticFactory, Registry, RegistryError, Settings, SolverFactory};
pub use replay::{replay_trajectory, verify_context_digests, DigestKind, ReplayError, ReplayReport};
pub use solver::{CassetteSolver, RecordingSolver, ScriptedSolver, Solver, SolverError};
pub use trajectory::{read_jsonl, write_jsonl, Cassette, TrajectoryError, TrajectoryStep};
