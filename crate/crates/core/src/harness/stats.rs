use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use super::{HarnessError, Params, TrialRecord};

/// Standard errors of slack allowed by the statistical rules.
pub const TOLERANCE_SE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// Pass iff `mean >= bound - 3 SE`.
    OneSided { bound: f64 },
    /// Pass iff `|mean - target| <= 3 SE`.
    TwoSided { target: f64 },
    /// Pass iff every record's own check holds.
    PerTrial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub seed: Option<u64>,
    pub params: Params,
    pub trials: u64,
    /// Trials dropped because an exact oracle exceeded its search budget.
    pub skipped: u64,
    /// Exact mean of the values as `p/q`.
    pub mean_exact: String,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub rule: Rule,
    pub tolerance_se: f64,
    pub violations: u64,
    /// Largest `reference / value` over the records, as `p/q`.
    pub max_ratio: String,
    pub verdict: Verdict,
    pub wall_clock_ms: u128,
    pub notes: BTreeMap<String, String>,
}

/// Mean, sample standard deviation and standard error of the record values,
/// and the verdict under `rule`.
pub fn summarize(suite: &str, rule: Rule, records: &[TrialRecord]) -> Result<ExperimentReport, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyStream);
    }
    let n = records.len() as u128;
    let sum: u128 = records.iter().map(|r| r.value as u128).sum();
    let sum_sq: u128 = records.iter().map(|r| (r.value as u128).pow(2)).sum();
    let mean = Ratio::new(sum, n);
    // (n * sum_sq - sum^2) / (n (n - 1)), exact before the square root
    let var = if n > 1 {
        let num = n * sum_sq - sum * sum;
        num as f64 / (n * (n - 1)) as f64
    } else {
        0.0
    };
    let sd = var.sqrt();
    let se = sd / (n as f64).sqrt();
    let mean_f = *mean.numer() as f64 / *mean.denom() as f64;
    let violations = records.iter().filter(|r| !r.ok).count() as u64;
    let max_ratio = records.iter().map(|r| r.ratio).max().expect("non-empty");
    let pass = match rule {
        Rule::OneSided { bound } => mean_f >= bound - TOLERANCE_SE * se,
        Rule::TwoSided { target } => (mean_f - target).abs() <= TOLERANCE_SE * se,
        Rule::PerTrial => violations == 0,
    };
    Ok(ExperimentReport {
        suite: suite.to_string(),
        seed: None,
        params: Params::default(),
        trials: records.len() as u64,
        skipped: 0,
        mean_exact: format!("{}/{}", mean.numer(), mean.denom()),
        mean: mean_f,
        sd,
        se,
        rule,
        tolerance_se: TOLERANCE_SE,
        violations,
        max_ratio: format!("{}/{}", max_ratio.numer(), max_ratio.denom()),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        wall_clock_ms: 0,
        notes: BTreeMap::new(),
    })
}
