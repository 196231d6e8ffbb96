use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ChatProvider, LlmError, MockProvider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Mock,
    Http,
}

/// How to reach a model. Keys are only ever read from the environment
/// variable named by `api_key_env`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model_name: Option<String>,
    #[serde(default)]
    pub api_key_env: Option<String>,
    /// Per-request timeout in seconds.
    #[serde(default = "default_timeout")]
    pub timeout: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// First retry delay in milliseconds; doubles on each retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_base_ms: u64,
    #[serde(default)]
    pub script_path: Option<PathBuf>,
    /// Extra request fields such as temperature, forwarded untouched.
    #[serde(default)]
    pub options: serde_json::Map<String, serde_json::Value>,
}

fn default_timeout() -> f64 {
    60.0
}

fn default_retries() -> u32 {
    2
}

fn default_backoff_ms() -> u64 {
    1000
}

impl ProviderConfig {
    pub fn mock(script_path: impl Into<PathBuf>) -> Self {
        Self {
            kind: ProviderKind::Mock,
            endpoint: None,
            model_name: None,
            api_key_env: None,
            timeout: default_timeout(),
            max_retries: default_retries(),
            backoff_base_ms: default_backoff_ms(),
            script_path: Some(script_path.into()),
            options: Default::default(),
        }
    }

    pub fn http(endpoint: impl Into<String>, api_key_env: impl Into<String>) -> Self {
        Self {
            kind: ProviderKind::Http,
            endpoint: Some(endpoint.into()),
            api_key_env: Some(api_key_env.into()),
            script_path: None,
            ..Self::mock("")
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(LlmError::Config(format!("timeout must be positive, got {}", self.timeout)));
        }
        match self.kind {
            ProviderKind::Mock => {
                if self.script_path.as_ref().is_none_or(|p| p.as_os_str().is_empty()) {
                    return Err(LlmError::Config("mock provider needs script_path".into()));
                }
            }
            ProviderKind::Http => {
                if self.endpoint.as_deref().is_none_or(str::is_empty) {
                    return Err(LlmError::Config("http provider needs endpoint".into()));
                }
                if self.api_key_env.as_deref().is_none_or(str::is_empty) {
                    return Err(LlmError::Config("http provider needs api_key_env".into()));
                }
            }
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout)
    }

    /// Builds the provider. Mock scripts are read here, so each call starts
    /// a fresh replay.
    pub fn build(&self) -> Result<Arc<dyn ChatProvider>, LlmError> {
        self.validate()?;
        match self.kind {
            ProviderKind::Mock => {
                let path = self.script_path.as_ref().expect("validated");
                Ok(Arc::new(MockProvider::load(path)?))
            }
            #[cfg(feature = "http-provider")]
            ProviderKind::Http => Ok(Arc::new(super::HttpProvider::new(self.clone())?)),
            #[cfg(not(feature = "http-provider"))]
            ProviderKind::Http => Err(LlmError::Config("built without the http-provider feature".into())),
        }
    }
}
