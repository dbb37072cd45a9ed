use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qa::keystats::{format_value, KeyStats};

/// Instruction prefixed to the statistic lines.
pub const REPHRASE_INSTRUCTION: &str = "Rephrase the following input more eloquently: ";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("text generation timed out")]
    Timeout,
    #[error("text generation failed: {0}")]
    Failed(String),
}

/// External text-generation endpoint.
pub trait TextGenerator: Send + Sync {
    fn generate(&self, prompt: &str) -> Result<String, GenerationError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub text: String,
    /// Whether `text` came from the text generator.
    pub rephrased: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn rephrase_prompt(lines: &[String]) -> String {
    format!("{REPHRASE_INSTRUCTION}\n'{}\n'", lines.join("\n"))
}

/// Numbers written in `text`: digit runs with an optional sign and decimal
/// part; currency symbols, percent signs and thousands separators are
/// ignored.
pub fn numbers_in(text: &str) -> Vec<f64> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let negative = i > 0
            && chars[i - 1] == '-'
            && (i < 2 || !chars[i - 2].is_alphanumeric());
        let negative = negative || (i > 1 && chars[i - 1] == '$' && chars[i - 2] == '-');
        let mut s = String::new();
        while i < chars.len() {
            let c = chars[i];
            let next_digit = chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
            if c.is_ascii_digit() {
                s.push(c);
            } else if c == '.' && next_digit && !s.contains('.') {
                s.push(c);
            } else if c == ',' && next_digit {
                // thousands separator
            } else {
                break;
            }
            i += 1;
        }
        if let Ok(v) = s.parse::<f64>() {
            out.push(if negative { -v } else { v });
        }
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Whether every number in `text` appears in the statistics, either as
/// written in the statistic lines or as a stored value (exact or rounded
/// to two decimals).
pub fn numbers_supported(text: &str, stats: &KeyStats) -> bool {
    let mut allowed: Vec<f64> = numbers_in(&stats.text());
    for v in stats.stats.values() {
        allowed.push(*v);
        allowed.extend(numbers_in(&format_value(*v, None)));
    }
    numbers_in(text).iter().all(|n| allowed.iter().any(|a| close(*a, *n) || close(*a, -*n)))
}

/// Rephrases the statistic lines through `client`, falling back to the
/// lines themselves when there is no client, the call fails, or the reply
/// contains a number the statistics do not.
pub fn rephrase_summary(stats: &KeyStats, client: Option<&dyn TextGenerator>) -> Summary {
    let fallback = |warning: Option<String>| Summary { text: stats.text(), rephrased: false, warning };
    let Some(client) = client else { return fallback(None) };
    if stats.lines.is_empty() {
        return fallback(None);
    }
    match client.generate(&rephrase_prompt(&stats.lines)) {
        Ok(reply) => {
            let reply = reply.trim().to_string();
            if reply.is_empty() {
                tracing::warn!("text generator returned an empty reply");
                fallback(Some("text generator returned an empty reply".into()))
            } else if !numbers_supported(&reply, stats) {
                tracing::warn!(%reply, "discarding rephrased summary with unsupported numbers");
                fallback(Some("rephrased summary contained numbers not in the statistics".into()))
            } else {
                Summary { text: reply, rephrased: true, warning: None }
            }
        }
        Err(e) => {
            tracing::warn!(error = %e, "text generation failed");
            fallback(Some(e.to_string()))
        }
    }
}
