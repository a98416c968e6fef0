//! Paired pre/post statistics: a Shapiro-Wilk normality gate in front of a
//! paired t-test or a Wilcoxon signed-rank test, and per-condition study
//! summaries.

mod paired;
mod shapiro;
mod study;

use serde::{Deserialize, Serialize};

pub use paired::{paired_t, wilcoxon_signed_rank, EXACT_MAX_N};
pub use shapiro::shapiro_wilk;
pub use study::{
    parse_scores, summarize_study, Condition, ConditionSummary, Exclusion, Group, ScoreRow,
    StudySummary, VariableSummary,
};

/// Normality gate level.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {min} values, got {n}")]
    SampleTooSmall { n: usize, min: usize },
    #[error("more than {max} values ({n})")]
    SampleTooLarge { n: usize, max: usize },
    #[error("all values are identical")]
    DegenerateSample,
    #[error("paired differences have zero spread")]
    DegenerateDifferences,
    #[error("every paired difference is zero")]
    AllZeroDifferences,
    #[error("paired samples differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("non-finite value in sample")]
    NonFinite,
    #[error("scores line {line}: {message}")]
    MalformedScores { line: usize, message: String },
    #[error("no child has complete scores")]
    NoCompleteChildren,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PairedT,
    Wilcoxon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    /// t for the t-test, T (smaller signed-rank sum) for Wilcoxon.
    pub statistic: f64,
    pub p: f64,
    /// Normal deviate of the signed-rank sum (Wilcoxon only).
    pub z: Option<f64>,
    /// |z| / sqrt(N) over non-zero pairs (Wilcoxon only).
    pub effect_r: Option<f64>,
    pub df: Option<usize>,
    /// Pairs that entered the test (after dropping zero differences).
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    #[serde(rename = "W")]
    pub w: f64,
    pub p: f64,
}

/// The test that ran, and the normality check that chose it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatedResult {
    /// `None` when the differences were constant and could not be tested.
    pub normality: Option<NormalityResult>,
    pub result: TestResult,
}

fn check_pairs(a: &[f64], b: &[f64]) -> Result<(), StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(StatsError::SampleTooSmall { n: a.len(), min: 3 });
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Differences `a[i] - b[i]`.
fn differences(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Shapiro-Wilk on the paired differences; paired t-test when normality is
/// not rejected at `alpha` (p ≥ alpha), Wilcoxon otherwise. Constant
/// differences cannot be tested for normality and go to Wilcoxon.
pub fn choose_and_run(a: &[f64], b: &[f64], alpha: f64) -> Result<GatedResult, StatsError> {
    check_pairs(a, b)?;
    let d = differences(a, b);
    match shapiro_wilk(&d) {
        Ok(normality) if normality.p >= alpha => Ok(GatedResult {
            normality: Some(normality),
            result: paired_t(a, b)?,
        }),
        Ok(normality) => Ok(GatedResult {
            normality: Some(normality),
            result: wilcoxon_signed_rank(a, b)?,
        }),
        Err(StatsError::DegenerateSample) => Ok(GatedResult {
            normality: None,
            result: wilcoxon_signed_rank(a, b)?,
        }),
        Err(e) => Err(e),
    }
}
