use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ChatMessage, ChatProvider, LlmError, Role};

/// One scripted reply, optionally guarded by a substring the incoming user
/// message must contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockEntry {
    pub reply: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

/// Replays a fixed script, one entry per call.
#[derive(Debug)]
pub struct MockProvider {
    entries: Vec<MockEntry>,
    cursor: Mutex<usize>,
}

impl MockProvider {
    pub fn new(entries: Vec<MockEntry>) -> Self {
        Self { entries, cursor: Mutex::new(0) }
    }

    pub fn from_replies<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        Self::new(replies.into_iter().map(|r| MockEntry { reply: r.into(), expect: None }).collect())
    }

    pub fn from_json(json: &str) -> Result<Self, LlmError> {
        let entries: Vec<MockEntry> = serde_json::from_str(json).map_err(|e| LlmError::Parse(e.to_string()))?;
        Ok(Self::new(entries))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LlmError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn entries(&self) -> &[MockEntry] {
        &self.entries
    }

    pub fn remaining(&self) -> usize {
        self.entries.len() - *self.cursor.lock().expect("mock cursor poisoned")
    }
}

impl ChatProvider for MockProvider {
    fn complete(&self, history: &[ChatMessage]) -> Result<String, LlmError> {
        let mut cursor = self.cursor.lock().expect("mock cursor poisoned");
        let index = *cursor;
        let entry = self.entries.get(index).ok_or(LlmError::MockScriptExhausted(self.entries.len()))?;
        if let Some(expected) = &entry.expect {
            let incoming = history.iter().rev().find(|m| m.role == Role::User).map_or("", |m| m.content.as_str());
            if !incoming.contains(expected.as_str()) {
                return Err(LlmError::MockExpectationFailed { index, expected: expected.clone() });
            }
        }
        *cursor += 1;
        Ok(entry.reply.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::super::Transcript;
    use super::*;

    const SCRIPT: &str = r#"[{"reply": "A"}, {"expect": "error", "reply": "B"}]"#;

    #[test]
    fn guarded_replies() {
        let mock = MockProvider::from_json(SCRIPT).unwrap();
        let mut t = Transcript::new("s");
        assert_eq!(t.send(&mock, "hi", 1).unwrap().content, "A");
        assert_eq!(t.send(&mock, "error: x", 2).unwrap().content, "B");
    }

    #[test]
    fn guard_mismatch() {
        let mock = MockProvider::from_json(SCRIPT).unwrap();
        let mut t = Transcript::new("s");
        t.send(&mock, "hi", 1).unwrap();
        assert_eq!(
            t.send(&mock, "all good", 2),
            Err(LlmError::MockExpectationFailed { index: 1, expected: "error".into() })
        );
        assert_eq!(mock.remaining(), 1);
    }

    #[test]
    fn bad_script() {
        assert!(matches!(MockProvider::from_json("{"), Err(LlmError::Parse(_))));
        assert!(matches!(MockProvider::from_json(r#"[{"expect": "x"}]"#), Err(LlmError::Parse(_))));
        assert!(matches!(MockProvider::load("/nonexistent/script.json"), Err(LlmError::Io(_))));
    }
}
