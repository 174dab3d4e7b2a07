use slate_core::agent::{Critic, CriticError, CritiqueInput};
use slate_core::protocol::{prompts, CritiqueReport};

use crate::client::{ChatClient, ChatMessage, ContentPart};

const REPORT_FORMAT: &str = "Reply with one JSON object and nothing else: \
{\"hallucinationDetected\": bool, \"issues\": [{\"category\": \"AttributeError\" | \"FalseExistence\" | \"SpatialConflict\", \
\"description\": string, \"targetIds\": [element ids]}]}";

/// Critic backed by a chat endpoint.
pub struct LlmCritic {
    client: ChatClient,
}

impl LlmCritic {
    pub fn new(client: ChatClient) -> Self {
        Self { client }
    }
}

/// Extracts the report from a reply; falls back to a report carrying the
/// raw text as notes when no valid JSON object is present.
pub fn parse_critique(reply: &str) -> CritiqueReport {
    let parsed = reply
        .find('{')
        .zip(reply.rfind('}'))
        .filter(|(a, b)| a < b)
        .and_then(|(a, b)| serde_json::from_str::<CritiqueReport>(&reply[a..=b]).ok());
    parsed.unwrap_or_else(|| CritiqueReport {
        hallucination_detected: false,
        issues: Vec::new(),
        notes: Some(reply.trim().to_owned()),
    })
}

impl Critic for LlmCritic {
    fn name(&self) -> &str {
        "llm"
    }

    fn critique(&mut self, input: &CritiqueInput<'_>) -> Result<Option<CritiqueReport>, CriticError> {
        let Some(original) = input.original else {
            return Ok(None);
        };
        let (_, task) = prompts::critique_parts();
        let text = format!("{}\n\nTask: {}\n\n{REPORT_FORMAT}", task.trim(), input.instruction);
        let messages = vec![ChatMessage {
            role: "user".into(),
            parts: vec![
                ContentPart::Text(text),
                ContentPart::Png(original.to_png()?),
                ContentPart::Png(input.render.to_png()?),
            ],
        }];
        let reply = self
            .client
            .complete(&messages)
            .map_err(|e| CriticError::Backend(e.to_string()))?;
        Ok(Some(parse_critique(&reply)))
    }
}
