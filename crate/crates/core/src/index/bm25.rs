use serde::{Deserialize, Serialize};

use crate::index::IndexError;

/// BM25 free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self, IndexError> {
        let p = Self { k1, b };
        p.validate()?;
        Ok(p)
    }

    /// k1 must lie in [1.2, 2.0] and b in [0, 1].
    pub fn validate(&self) -> Result<(), IndexError> {
        if !(1.2..=2.0).contains(&self.k1) {
            return Err(IndexError::InvalidArgument(format!("k1 = {} outside [1.2, 2.0]", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(IndexError::InvalidArgument(format!("b = {} outside [0, 1]", self.b)));
        }
        Ok(())
    }
}

/// Inverse document frequency: `ln(1 + (docCnt - df + 0.5) / (df + 0.5))`.
pub fn idf(doc_cnt: usize, df: usize) -> Result<f64, IndexError> {
    if df > doc_cnt {
        return Err(IndexError::InvalidArgument(format!("df {df} exceeds docCnt {doc_cnt}")));
    }
    let (n, df) = (doc_cnt as f64, df as f64);
    Ok((1.0 + (n - df + 0.5) / (df + 0.5)).ln())
}

/// Contribution of one query term with frequency `tf` in a document of
/// length `len`.
pub fn term_score(idf: f64, tf: f64, len: f64, avgdl: f64, params: Bm25Params) -> f64 {
    if tf <= 0.0 {
        return 0.0;
    }
    let ratio = if avgdl > 0.0 { len / avgdl } else { 1.0 };
    idf * tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * ratio))
}
