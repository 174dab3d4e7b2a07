//! Chat-completion backends: a solver and a critic that talk to an
//! OpenAI-compatible `/chat/completions` endpoint.

mod client;
mod critic;

use std::sync::Arc;

use serde_json::Value;
use slate_core::agent::{Critic, Registry, RegistryError, Settings, Solver, SolverError};
use slate_core::protocol::RenderedContext;

pub use client::{ChatClient, ChatConfig, ChatError, ChatMessage, ContentPart, API_KEY_ENV};
pub use critic::{parse_critique, LlmCritic};

/// Solver backed by a chat endpoint.
pub struct LlmSolver {
    client: ChatClient,
}

impl LlmSolver {
    pub fn new(client: ChatClient) -> Self {
        Self { client }
    }
}

/// Message list for one solver context: the system prompt, then the user
/// text followed by the images.
pub fn solver_messages(context: &RenderedContext) -> Vec<ChatMessage> {
    let mut parts = vec![ContentPart::Text(context.user.clone())];
    parts.extend(context.images.iter().map(|a| ContentPart::Png(a.png.clone())));
    vec![
        ChatMessage::system(context.system.clone()),
        ChatMessage {
            role: "user".into(),
            parts,
        },
    ]
}

impl Solver for LlmSolver {
    fn name(&self) -> &str {
        "llm"
    }

    fn respond(&mut self, context: &RenderedContext) -> Result<String, SolverError> {
        self.client
            .complete(&solver_messages(context))
            .map_err(|e| SolverError::new(e.to_string()))
    }
}

fn config_from(settings: &Settings) -> Result<ChatConfig, RegistryError> {
    serde_json::from_value(Value::Object(settings.clone())).map_err(|e| RegistryError::Settings {
        name: "llm".into(),
        message: e.to_string(),
    })
}

fn client_from(settings: &Settings) -> Result<ChatClient, RegistryError> {
    ChatClient::from_env(config_from(settings)?).map_err(|e| RegistryError::Settings {
        name: "llm".into(),
        message: e.to_string(),
    })
}

/// Adds the `llm` solver and critic to `registry`.
pub fn register(registry: &mut Registry) {
    registry.register_solver(
        "llm",
        Arc::new(|s: &Settings| Ok(Box::new(LlmSolver::new(client_from(s)?)) as Box<dyn Solver>)),
    );
    registry.register_critic(
        "llm",
        Arc::new(|s: &Settings| Ok(Box::new(LlmCritic::new(client_from(s)?)) as Box<dyn Critic>)),
    );
}
