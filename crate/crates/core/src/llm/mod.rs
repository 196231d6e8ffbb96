//! Chat providers with conversation memory.
//!
//! Every call resends the whole transcript. [`MockProvider`] replays a
//! script for tests; `HttpProvider` speaks the chat-completions wire shape.

mod config;
#[cfg(feature = "http-provider")]
mod http;
mod mock;

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ProviderConfig, ProviderKind};
#[cfg(feature = "http-provider")]
pub use http::HttpProvider;
pub use mock::{MockEntry, MockProvider};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LlmError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication error: {0}")]
    Auth(String),
    #[error("mock script exhausted after {0} replies")]
    MockScriptExhausted(usize),
    #[error("mock reply {index} expects the message to contain {expected:?}")]
    MockExpectationFailed { index: usize, expected: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid provider config: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
    pub timestamp: DateTime<Utc>,
    pub iteration: u64,
}

/// A chat backend. Implementations must be shareable across sessions.
pub trait ChatProvider: Send + Sync {
    /// Returns the assistant reply to `history`, whose last entry is the new
    /// user message.
    fn complete(&self, history: &[ChatMessage]) -> Result<String, LlmError>;
}

/// Append-only message log of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    messages: Vec<ChatMessage>,
}

impl Transcript {
    pub fn new(session_id: impl Into<String>) -> Self {
        Self { session_id: session_id.into(), messages: Vec::new() }
    }

    pub fn messages(&self) -> &[ChatMessage] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    fn make(&self, role: Role, content: String, iteration: u64) -> Result<ChatMessage, LlmError> {
        if content.trim().is_empty() {
            return Err(LlmError::Parse(format!("empty {} message", role.as_str())));
        }
        // timestamps never go backwards within a transcript
        let now = Utc::now();
        let timestamp = self.messages.last().map_or(now, |m| m.timestamp.max(now));
        Ok(ChatMessage { role, content, timestamp, iteration })
    }

    /// Appends a message without contacting a provider.
    pub fn push(&mut self, role: Role, content: impl Into<String>, iteration: u64) -> Result<&ChatMessage, LlmError> {
        let msg = self.make(role, content.into(), iteration)?;
        self.messages.push(msg);
        Ok(self.messages.last().expect("just pushed"))
    }

    /// Sends `user_message` with the full history and appends both turns on
    /// success. On failure the transcript is unchanged.
    pub fn send(
        &mut self,
        provider: &dyn ChatProvider,
        user_message: impl Into<String>,
        iteration: u64,
    ) -> Result<ChatMessage, LlmError> {
        let user = self.make(Role::User, user_message.into(), iteration)?;
        let mut history = self.messages.clone();
        history.push(user.clone());
        let reply = provider.complete(&history)?;
        self.messages.push(user);
        let assistant = self.make(Role::Assistant, reply, iteration)?;
        self.messages.push(assistant.clone());
        Ok(assistant)
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&serde_json::to_string(m).expect("messages serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(session_id: impl Into<String>, text: &str) -> Result<Self, LlmError> {
        let mut t = Transcript::new(session_id);
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let m: ChatMessage =
                serde_json::from_str(line).map_err(|e| LlmError::Parse(format!("line {}: {e}", n + 1)))?;
            t.messages.push(m);
        }
        Ok(t)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LlmError> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| LlmError::Io(e.to_string()))
    }

    pub fn load(session_id: impl Into<String>, path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path).map_err(|e| LlmError::Io(e.to_string()))?;
        Self::from_jsonl(session_id, &text)
    }

    /// Role and content of every message, for comparisons that ignore time.
    pub fn contents(&self) -> Vec<(Role, &str, u64)> {
        self.messages.iter().map(|m| (m.role, m.content.as_str(), m.iteration)).collect()
    }
}
