use chartseek_core::qa::{GenerationError, TextGenerator};
use reqwest::blocking::Client;
use serde_json::{json, Value};

use crate::config::LlmConfig;

/// Text generator behind an HTTP endpoint.
///
/// Sends `{"prompt": ..., "model": ...}` with an optional bearer token and
/// accepts a reply carrying the text as `text`, `response`, `output`,
/// `choices[0].text` or `choices[0].message.content`.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    client: Client,
    endpoint: String,
    model: Option<String>,
    api_key: Option<String>,
}

impl HttpGenerator {
    /// Returns `None` when generation is disabled or no endpoint is set.
    ///
    /// Must not be called from within an async runtime.
    pub fn from_config(config: &LlmConfig) -> Result<Option<Self>, reqwest::Error> {
        let Some(endpoint) = config.endpoint.clone().filter(|_| config.enabled) else { return Ok(None) };
        let client = Client::builder().timeout(config.timeout()).build()?;
        Ok(Some(Self { client, endpoint, model: config.model.clone(), api_key: config.api_key.clone() }))
    }
}

/// Pulls the generated text out of a reply body.
pub fn reply_text(body: &Value) -> Option<String> {
    let pointers = ["/text", "/response", "/output", "/choices/0/text", "/choices/0/message/content"];
    pointers.iter().find_map(|p| body.pointer(p).and_then(Value::as_str)).map(str::to_string)
}

impl TextGenerator for HttpGenerator {
    fn generate(&self, prompt: &str) -> Result<String, GenerationError> {
        let mut body = json!({ "prompt": prompt });
        if let Some(m) = &self.model {
            body["model"] = json!(m);
        }
        let mut req = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let map_err = |e: reqwest::Error| {
            if e.is_timeout() {
                GenerationError::Timeout
            } else {
                GenerationError::Failed(e.to_string())
            }
        };
        let resp = req.send().map_err(map_err)?.error_for_status().map_err(map_err)?;
        let value: Value = resp.json().map_err(map_err)?;
        reply_text(&value).ok_or_else(|| GenerationError::Failed("reply has no text field".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reply_shapes() {
        assert_eq!(reply_text(&json!({"text": "a"})).as_deref(), Some("a"));
        assert_eq!(reply_text(&json!({"choices": [{"message": {"content": "b"}}]})).as_deref(), Some("b"));
        assert_eq!(reply_text(&json!({"choices": [{"text": "c"}]})).as_deref(), Some("c"));
        assert_eq!(reply_text(&json!({"other": 1})), None);
    }

    #[test]
    fn disabled_means_no_client() {
        assert!(HttpGenerator::from_config(&LlmConfig::default()).unwrap().is_none());
    }
}
