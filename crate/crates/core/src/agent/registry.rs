use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::protocol::{TokenCounter, WhitespaceCounter, WordPunctCounter};

use super::critic::{Critic, DiffCritic, DiffCriticOptions, NoCritic};
use super::solver::{CassetteSolver, ScriptedSolver, Solver};
use super::trajectory::Cassette;

/// Free-form settings handed to a factory.
pub type Settings = Map<String, Value>;

pub type SolverFactory = Arc<dyn Fn(&Settings) -> Result<Box<dyn Solver>, RegistryError> + Send + Sync>;
pub type CriticFactory = Arc<dyn Fn(&Settings) -> Result<Box<dyn Critic>, RegistryError> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown {kind} {name:?} (available: {})", available.join(", "))]
    Unknown {
        kind: &'static str,
        name: String,
        available: Vec<String>,
    },
    #[error("{name}: {message}")]
    Settings { name: String, message: String },
}

fn settings_error(name: &str, message: impl Into<String>) -> RegistryError {
    RegistryError::Settings {
        name: name.to_owned(),
        message: message.into(),
    }
}

/// Named strategies for solvers, critics and token counters.
#[derive(Clone, Default)]
pub struct Registry {
    solvers: BTreeMap<String, SolverFactory>,
    critics: BTreeMap<String, CriticFactory>,
    counters: BTreeMap<String, Arc<dyn TokenCounter>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry with the offline strategies: `scripted` and `cassette`
    /// solvers, `diff` and `none` critics, `word-punct` and `whitespace`
    /// counters.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register_solver("scripted", Arc::new(scripted_solver));
        r.register_solver("cassette", Arc::new(cassette_solver));
        r.register_critic(
            "diff",
            Arc::new(|s: &Settings| {
                let options: DiffCriticOptions = serde_json::from_value(Value::Object(s.clone()))
                    .map_err(|e| settings_error("diff", e.to_string()))?;
                if !(0.0..=1.0).contains(&options.threshold) {
                    return Err(settings_error("diff", "threshold must lie in [0, 1]"));
                }
                Ok(Box::new(DiffCritic::new(options)) as Box<dyn Critic>)
            }),
        );
        r.register_critic("none", Arc::new(|_: &Settings| Ok(Box::new(NoCritic) as Box<dyn Critic>)));
        r.register_counter(Arc::new(WordPunctCounter));
        r.register_counter(Arc::new(WhitespaceCounter));
        r
    }

    pub fn register_solver(&mut self, name: &str, factory: SolverFactory) {
        self.solvers.insert(name.to_owned(), factory);
    }

    pub fn register_critic(&mut self, name: &str, factory: CriticFactory) {
        self.critics.insert(name.to_owned(), factory);
    }

    pub fn register_counter(&mut self, counter: Arc<dyn TokenCounter>) {
        self.counters.insert(counter.method().to_owned(), counter);
    }

    pub fn solver(&self, name: &str, settings: &Settings) -> Result<Box<dyn Solver>, RegistryError> {
        let f = self.solvers.get(name).ok_or_else(|| unknown("solver", name, self.solvers.keys()))?;
        f(settings)
    }

    pub fn critic(&self, name: &str, settings: &Settings) -> Result<Box<dyn Critic>, RegistryError> {
        let f = self.critics.get(name).ok_or_else(|| unknown("critic", name, self.critics.keys()))?;
        f(settings)
    }

    pub fn counter(&self, name: &str) -> Result<Arc<dyn TokenCounter>, RegistryError> {
        self.counters
            .get(name)
            .cloned()
            .ok_or_else(|| unknown("token counter", name, self.counters.keys()))
    }

    pub fn solver_names(&self) -> Vec<&str> {
        self.solvers.keys().map(String::as_str).collect()
    }

    pub fn critic_names(&self) -> Vec<&str> {
        self.critics.keys().map(String::as_str).collect()
    }
}

fn unknown<'a>(kind: &'static str, name: &str, keys: impl Iterator<Item = &'a String>) -> RegistryError {
    RegistryError::Unknown {
        kind,
        name: name.to_owned(),
        available: keys.cloned().collect(),
    }
}

/// `turns`: list of responses; `repeat`: keep answering with the last one.
fn scripted_solver(s: &Settings) -> Result<Box<dyn Solver>, RegistryError> {
    let turns: Vec<String> = match s.get("turns") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| settings_error("scripted", e.to_string()))?,
        None => return Err(settings_error("scripted", "missing \"turns\"")),
    };
    let repeat = s.get("repeat").and_then(Value::as_bool).unwrap_or(false);
    Ok(Box::new(if repeat {
        ScriptedSolver::repeating(turns)
    } else {
        ScriptedSolver::new(turns)
    }))
}

/// `cassette`: an inline digest map or the path of a cassette file.
fn cassette_solver(s: &Settings) -> Result<Box<dyn Solver>, RegistryError> {
    let cassette = match s.get("cassette") {
        Some(Value::String(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| settings_error("cassette", format!("{path}: {e}")))?;
            Cassette::from_json(&text).map_err(|e| settings_error("cassette", format!("{path}: {e}")))?
        }
        Some(v @ Value::Object(_)) => {
            serde_json::from_value(v.clone()).map_err(|e| settings_error("cassette", e.to_string()))?
        }
        _ => return Err(settings_error("cassette", "missing \"cassette\" path or map")),
    };
    Ok(Box::new(CassetteSolver::new(cassette)))
}
