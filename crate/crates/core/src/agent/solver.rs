use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::protocol::RenderedContext;

use super::trajectory::Cassette;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct SolverError {
    pub message: String,
}

impl SolverError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

/// Produces one raw response per context.
pub trait Solver: Send {
    fn name(&self) -> &str;

    fn respond(&mut self, context: &RenderedContext) -> Result<String, SolverError>;
}

/// Plays back a fixed list of responses in order.
#[derive(Debug, Clone)]
pub struct ScriptedSolver {
    turns: Vec<String>,
    next: usize,
    /// Keep returning the last response once the list runs out.
    repeat_last: bool,
}

impl ScriptedSolver {
    pub fn new(turns: Vec<String>) -> Self {
        Self {
            turns,
            next: 0,
            repeat_last: false,
        }
    }

    pub fn repeating(turns: Vec<String>) -> Self {
        Self {
            repeat_last: true,
            ..Self::new(turns)
        }
    }
}

impl Solver for ScriptedSolver {
    fn name(&self) -> &str {
        "scripted"
    }

    fn respond(&mut self, _context: &RenderedContext) -> Result<String, SolverError> {
        let i = if self.repeat_last {
            self.next.min(self.turns.len().saturating_sub(1))
        } else {
            self.next
        };
        let out = self
            .turns
            .get(i)
            .cloned()
            .ok_or_else(|| SolverError::new(format!("script exhausted after {} turns", self.turns.len())))?;
        self.next += 1;
        Ok(out)
    }
}

/// Serves responses recorded against context digests.
#[derive(Debug, Clone)]
pub struct CassetteSolver {
    entries: BTreeMap<String, String>,
}

impl CassetteSolver {
    pub fn new(cassette: Cassette) -> Self {
        Self {
            entries: cassette.entries,
        }
    }
}

impl Solver for CassetteSolver {
    fn name(&self) -> &str {
        "cassette"
    }

    fn respond(&mut self, context: &RenderedContext) -> Result<String, SolverError> {
        self.entries
            .get(&context.digest)
            .cloned()
            .ok_or_else(|| SolverError::new(format!("no cassette entry for context {}", context.digest)))
    }
}

/// Wraps a solver and records every exchange into a shared cassette.
pub struct RecordingSolver<S> {
    inner: S,
    tape: Arc<Mutex<Cassette>>,
}

impl<S: Solver> RecordingSolver<S> {
    pub fn new(inner: S) -> (Self, Arc<Mutex<Cassette>>) {
        let tape = Arc::new(Mutex::new(Cassette::default()));
        (
            Self {
                inner,
                tape: Arc::clone(&tape),
            },
            tape,
        )
    }
}

impl<S: Solver> Solver for RecordingSolver<S> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn respond(&mut self, context: &RenderedContext) -> Result<String, SolverError> {
        let response = self.inner.respond(context)?;
        self.tape
            .lock()
            .expect("cassette lock")
            .entries
            .insert(context.digest.clone(), response.clone());
        Ok(response)
    }
}

impl Solver for Box<dyn Solver> {
    fn name(&self) -> &str {
        self.as_ref().name()
    }

    fn respond(&mut self, context: &RenderedContext) -> Result<String, SolverError> {
        self.as_mut().respond(context)
    }
}
