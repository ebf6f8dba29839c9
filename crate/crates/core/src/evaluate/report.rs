use serde::{Deserialize, Serialize};

use super::{CostMode, CostReport};
use crate::prob::Prob;

pub const CSV_HEADER: &str = "model_hash,strategy_hash,mode,total,per_stage,samples,std_error,seed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: usize,
    pub inner: String,
    pub outer: String,
}

/// Text form of a [`CostReport`]; values keep the arithmetic's own
/// notation and a decimal rendering of the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub mode: String,
    pub total: String,
    pub total_decimal: f64,
    pub per_stage: Vec<StageSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl<S: Prob> CostReport<S> {
    pub fn summary(&self) -> CostSummary {
        let (mode, samples, std_error, seed) = match self.mode {
            CostMode::Exact => ("exact", None, None, None),
            CostMode::MonteCarlo { samples, std_error, seed } => ("monte_carlo", Some(samples), Some(std_error), Some(seed)),
        };
        CostSummary {
            mode: mode.into(),
            total: self.total.to_string(),
            total_decimal: self.total.to_f64(),
            per_stage: self
                .per_stage
                .iter()
                .enumerate()
                .map(|(i, st)| StageSummary { stage: i + 1, inner: st.inner.to_string(), outer: st.outer.to_string() })
                .collect(),
            samples,
            std_error,
            seed,
        }
    }

    /// One CSV row matching [`CSV_HEADER`]; per-stage values are
    /// `inner:outer` pairs joined by `;`.
    pub fn csv_row(&self, model_hash: &str, strategy_hash: &str) -> String {
        let s = self.summary();
        let stages: Vec<String> = s.per_stage.iter().map(|st| format!("{}:{}", st.inner, st.outer)).collect();
        let opt = |x: Option<String>| x.unwrap_or_default();
        format!(
            "{model_hash},{strategy_hash},{},{},{},{},{},{}",
            s.mode,
            s.total,
            stages.join(";"),
            opt(s.samples.map(|x| x.to_string())),
            opt(s.std_error.map(|x| x.to_string())),
            opt(s.seed.map(|x| x.to_string())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::StageCost;
    use super::*;
    use crate::exact::Exact;

    #[test]
    fn csv_row_has_one_field_per_header_column() {
        let r = CostReport {
            total: Exact::new(3, 4),
            per_stage: vec![StageCost { inner: Exact::new(1, 4), outer: Exact::new(1, 2) }],
            mode: CostMode::Exact,
        };
        let row = r.csv_row("aa", "bb");
        assert_eq!(row, "aa,bb,exact,3/4,1/4:1/2,,,");
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        let mc = CostReport { total: 0.5, per_stage: vec![], mode: CostMode::MonteCarlo { samples: 10, std_error: 0.1, seed: 4 } };
        assert_eq!(mc.csv_row("a", "b"), "a,b,monte_carlo,0.5,,10,0.1,4");
    }
}
