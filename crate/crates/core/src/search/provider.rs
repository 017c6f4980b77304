//! Text-completion backends for the evolutionary search.

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    /// Zero-based call number within a run; lets scripted providers answer
    /// deterministically even when several requests are in flight.
    pub call: u64,
    pub prompt: String,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("provider configuration: {0}")]
    Config(String),
    #[error("request failed after {attempts} attempt(s): {message}")]
    Unreachable { attempts: u32, message: String },
    #[error("malformed provider response: {0}")]
    BadResponse(String),
    #[error("scripted provider has no reply for call {0}")]
    Exhausted(u64),
}

pub trait Provider: Sync {
    fn complete(&self, request: &Request) -> Result<String, ProviderError>;
}

/// Replays a fixed list of replies, indexed by call number.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MockProvider {
    replies: Vec<String>,
}

impl MockProvider {
    pub fn new(replies: Vec<String>) -> MockProvider {
        MockProvider { replies }
    }

    /// Replies separated by lines consisting of `---`.
    pub fn from_script(text: &str) -> MockProvider {
        let mut replies = Vec::new();
        let mut cur = String::new();
        for line in text.lines() {
            if line.trim() == "---" {
                replies.push(std::mem::take(&mut cur));
            } else {
                cur.push_str(line);
                cur.push('\n');
            }
        }
        if !cur.trim().is_empty() {
            replies.push(cur);
        }
        MockProvider { replies }
    }

    pub fn len(&self) -> usize {
        self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replies.is_empty()
    }
}

impl Provider for MockProvider {
    fn complete(&self, request: &Request) -> Result<String, ProviderError> {
        self.replies.get(request.call as usize).cloned().ok_or(ProviderError::Exhausted(request.call))
    }
}

pub const ENV_URL: &str = "ADVLAB_API_URL";
pub const ENV_KEY: &str = "ADVLAB_API_KEY";
pub const ENV_MODEL: &str = "ADVLAB_MODEL";
pub const DEFAULT_MODEL: &str = "gpt-4.1-nano";

/// A chat-completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpConfig {
    pub endpoint: String,
    #[serde(skip_serializing)]
    pub api_key: String,
    pub model: String,
    pub timeout: Duration,
    pub retries: u32,
    pub backoff: Duration,
}

impl HttpConfig {
    /// Reads endpoint, key and model from the environment.
    pub fn from_env() -> Result<HttpConfig, ProviderError> {
        let get = |k: &str| std::env::var(k).ok().filter(|v| !v.trim().is_empty());
        let endpoint = get(ENV_URL).ok_or_else(|| ProviderError::Config(format!("{ENV_URL} is not set")))?;
        let api_key = get(ENV_KEY).ok_or_else(|| ProviderError::Config(format!("{ENV_KEY} is not set")))?;
        Ok(HttpConfig {
            endpoint,
            api_key,
            model: get(ENV_MODEL).unwrap_or_else(|| DEFAULT_MODEL.to_string()),
            timeout: Duration::from_secs(60),
            retries: 3,
            backoff: Duration::from_millis(500),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProviderConfig {
    Http(HttpConfig),
    Mock(MockProvider),
}

impl ProviderConfig {
    pub fn build(self) -> Box<dyn Provider> {
        match self {
            ProviderConfig::Http(c) => Box::new(HttpProvider::new(c)),
            ProviderConfig::Mock(m) => Box::new(m),
        }
    }
}

pub struct HttpProvider {
    config: HttpConfig,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(config: HttpConfig) -> HttpProvider {
        let agent = ureq::Agent::config_builder().timeout_global(Some(config.timeout)).build().into();
        HttpProvider { config, agent }
    }

    fn attempt(&self, body: &str) -> Result<String, String> {
        let mut resp = self
            .agent
            .post(&self.config.endpoint)
            .header("Authorization", format!("Bearer {}", self.config.api_key))
            .content_type("application/json")
            .send(body)
            .map_err(|e| e.to_string())?;
        resp.body_mut().read_to_string().map_err(|e| e.to_string())
    }
}

impl Provider for HttpProvider {
    fn complete(&self, request: &Request) -> Result<String, ProviderError> {
        let body = serde_json::json!({
            "model": self.config.model,
            "temperature": request.temperature,
            "messages": [{ "role": "user", "content": request.prompt }],
        })
        .to_string();
        let attempts = self.config.retries + 1;
        let mut last = String::new();
        for i in 0..attempts {
            if i > 0 {
                std::thread::sleep(self.config.backoff * 2u32.pow(i - 1));
            }
            match self.attempt(&body) {
                Ok(text) => return extract_content(&text),
                Err(e) => last = e,
            }
        }
        Err(ProviderError::Unreachable { attempts, message: last })
    }
}

fn extract_content(text: &str) -> Result<String, ProviderError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ProviderError::BadResponse(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| ProviderError::BadResponse("no choices[0].message.content".into()))
}
