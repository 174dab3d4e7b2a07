use std::thread;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tracing::warn;

/// Environment variable holding the bearer token. Never read from files.
pub const API_KEY_ENV: &str = "SLATE_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChatConfig {
    /// Base URL; `/chat/completions` is appended.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_secs: u64,
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// First backoff delay; doubles on each retry.
    pub backoff_ms: u64,
    pub max_tokens: Option<u32>,
}

impl Default for ChatConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4o".into(),
            temperature: 0.0,
            timeout_secs: 120,
            max_retries: 3,
            backoff_ms: 500,
            max_tokens: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContentPart {
    Text(String),
    Png(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatMessage {
    pub role: String,
    pub parts: Vec<ContentPart>,
}

impl ChatMessage {
    pub fn system(text: impl Into<String>) -> Self {
        Self {
            role: "system".into(),
            parts: vec![ContentPart::Text(text.into())],
        }
    }

    fn to_json(&self) -> Value {
        if let [ContentPart::Text(t)] = self.parts.as_slice() {
            return json!({ "role": self.role, "content": t });
        }
        let content: Vec<Value> = self
            .parts
            .iter()
            .map(|p| match p {
                ContentPart::Text(t) => json!({ "type": "text", "text": t }),
                ContentPart::Png(png) => json!({
                    "type": "image_url",
                    "image_url": { "url": format!("data:image/png;base64,{}", STANDARD.encode(png)) }
                }),
            })
            .collect();
        json!({ "role": self.role, "content": content })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChatError {
    #[error("invalid client configuration: {0}")]
    Config(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response body: {0}")]
    Decode(String),
    #[error("gave up after {attempts} attempts; last error: {last}")]
    Exhausted { attempts: u32, last: Box<ChatError> },
}

impl ChatError {
    fn retryable(&self) -> bool {
        match self {
            ChatError::Transport(_) => true,
            ChatError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub struct ChatClient {
    http: reqwest::blocking::Client,
    config: ChatConfig,
    api_key: Option<String>,
}

impl ChatClient {
    pub fn new(config: ChatConfig, api_key: Option<String>) -> Result<Self, ChatError> {
        if config.endpoint.trim().is_empty() || config.model.trim().is_empty() {
            return Err(ChatError::Config("endpoint and model must be set".into()));
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs.max(1)))
            .build()
            .map_err(|e| ChatError::Config(e.to_string()))?;
        Ok(Self { http, config, api_key })
    }

    /// Reads the token from [`API_KEY_ENV`].
    pub fn from_env(config: ChatConfig) -> Result<Self, ChatError> {
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::new(config, key)
    }

    pub fn config(&self) -> &ChatConfig {
        &self.config
    }

    pub fn request_body(&self, messages: &[ChatMessage]) -> Value {
        let mut body = json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": messages.iter().map(ChatMessage::to_json).collect::<Vec<_>>(),
        });
        if let Some(n) = self.config.max_tokens {
            body["max_tokens"] = json!(n);
        }
        body
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }

    fn attempt(&self, body: &Value) -> Result<String, ChatError> {
        let mut req = self.http.post(self.url()).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| ChatError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| ChatError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ChatError::Status {
                status: status.as_u16(),
                body: text.chars().take(500).collect(),
            });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| ChatError::Decode(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| ChatError::Decode("missing choices[0].message.content".into()))
    }

    /// Sends the messages, retrying transport failures, 429 and 5xx with
    /// exponential backoff.
    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String, ChatError> {
        let body = self.request_body(messages);
        let attempts = self.config.max_retries + 1;
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut n = 0;
        loop {
            n += 1;
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(e) if e.retryable() && n < attempts => {
                    warn!(attempt = n, error = %e, "chat request failed; retrying");
                    thread::sleep(delay);
                    delay *= 2;
                }
                Err(e) if e.retryable() => {
                    return Err(ChatError::Exhausted {
                        attempts: n,
                        last: Box::new(e),
                    })
                }
                Err(e) => return Err(e),
            }
        }
    }
}
