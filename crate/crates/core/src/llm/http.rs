use std::sync::OnceLock;
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::{ChatMessage, ChatProvider, LlmError, ProviderConfig};

/// Chat-completions client: posts `{model, messages, ..options}` and reads
/// `choices[0].message.content`.
pub struct HttpProvider {
    config: ProviderConfig,
    // built on first use so construction is safe inside an async runtime
    client: OnceLock<reqwest::blocking::Client>,
}

enum Failure {
    Retry(String),
    Fatal(LlmError),
}

impl HttpProvider {
    pub fn new(config: ProviderConfig) -> Result<Self, LlmError> {
        config.validate()?;
        Ok(Self { config, client: OnceLock::new() })
    }

    fn client(&self) -> Result<&reqwest::blocking::Client, LlmError> {
        if let Some(c) = self.client.get() {
            return Ok(c);
        }
        let built = reqwest::blocking::Client::builder()
            .timeout(self.config.timeout())
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(self.client.get_or_init(|| built))
    }

    fn body(&self, history: &[ChatMessage]) -> Value {
        let mut body = self.config.options.clone();
        if let Some(model) = &self.config.model_name {
            body.insert("model".into(), json!(model));
        }
        let messages: Vec<Value> = history.iter().map(|m| json!({"role": m.role.as_str(), "content": m.content})).collect();
        body.insert("messages".into(), Value::Array(messages));
        Value::Object(body)
    }

    fn attempt(&self, key: &str, body: &Value) -> Result<String, Failure> {
        let endpoint = self.config.endpoint.as_deref().expect("validated");
        let resp = self
            .client()
            .map_err(Failure::Fatal)?
            .post(endpoint)
            .bearer_auth(key)
            .json(body)
            .send()
            .map_err(|e| Failure::Retry(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(Failure::Fatal(LlmError::Auth(format!("endpoint answered {status}"))));
        }
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Failure::Retry(format!("endpoint answered {status}")));
        }
        if !status.is_success() {
            return Err(Failure::Fatal(LlmError::Transport(format!("endpoint answered {status}"))));
        }
        let value: Value = resp.json().map_err(|e| Failure::Fatal(LlmError::Parse(e.to_string())))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| Failure::Fatal(LlmError::Parse("response has no choices[0].message.content".into())))
    }
}

impl ChatProvider for HttpProvider {
    fn complete(&self, history: &[ChatMessage]) -> Result<String, LlmError> {
        let var = self.config.api_key_env.as_deref().expect("validated");
        let key = std::env::var(var).map_err(|_| LlmError::Auth(format!("environment variable {var} is not set")))?;
        let body = self.body(history);
        let mut delay = Duration::from_millis(self.config.backoff_base_ms);
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                log::warn!("retrying chat request ({attempt}/{}): {last}", self.config.max_retries);
                thread::sleep(delay);
                delay *= 2;
            }
            match self.attempt(&key, &body) {
                Ok(reply) => return Ok(reply),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retry(msg)) => last = msg,
            }
        }
        Err(LlmError::Transport(format!("{} attempts failed: {last}", self.config.max_retries + 1)))
    }
}
