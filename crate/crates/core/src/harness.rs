//! Alignment evaluation against human rankings.
//!
//! For every response the subject's preferences are used to rank the
//! referenced case, and the model order is compared to the human order.
//! Results are summarised two ways: the mean of per-subject means (headline)
//! and the mean pooled over all (subject, case) pairs. Spreads are sample
//! standard deviations.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Preferences, Response};
use crate::error::{MetricError, ModelError};
use crate::mcdm::Method;
use crate::metrics::{
    avg_acc, kendall, mae, mean_and_sd, os_sim, RankingPair, ScorePrediction,
};
use crate::model::DecisionCase;
use crate::scoring::ScoringConfig;
use crate::variants::{rank_variant, Variant};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no responses to evaluate")]
    NoResponses,
    #[error("subject {0:?} has responses but no preferences")]
    MissingPreferences(String),
    #[error("response references unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub method: Method,
    pub variant: Variant,
    pub scoring: ScoringConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Promethee,
            variant: Variant::Full,
            scoring: ScoringConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub subject_id: String,
    pub case_id: String,
    pub predicted: Vec<String>,
    pub reference: Vec<String>,
    pub os_sim: f64,
    pub first_match: bool,
    /// Absent when the two orders cover different action sets.
    pub kendall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectSummary {
    pub subject_id: String,
    pub cases: usize,
    pub mean_os_sim: f64,
    pub first_acc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub method: Method,
    pub variant: Variant,
    pub w: f64,
    pub records: Vec<PairRecord>,
    pub subjects: Vec<SubjectSummary>,
    /// Mean over subjects of each subject's mean OS-Sim.
    pub os_sim_mean_of_means: f64,
    pub os_sim_subject_sd: f64,
    /// Mean over all (subject, case) pairs.
    pub os_sim_pooled: f64,
    pub os_sim_pooled_sd: f64,
    /// Pooled over all pairs.
    pub first_acc: f64,
    pub first_acc_mean_of_means: f64,
    pub first_acc_subject_sd: f64,
}

/// Compares a predicted order against a reference order.
pub fn compare(subject_id: &str, case_id: &str, predicted: Vec<String>, reference: Vec<String>) -> Result<PairRecord, MetricError> {
    let pair = RankingPair::new(predicted, reference)?;
    let kendall = if pair.is_permutation() { Some(kendall(&pair)?) } else { None };
    Ok(PairRecord {
        subject_id: subject_id.to_string(),
        case_id: case_id.to_string(),
        os_sim: os_sim(&pair),
        first_match: pair.first_match(),
        kendall,
        predicted: pair.predicted().to_vec(),
        reference: pair.reference().to_vec(),
    })
}

/// Summarises already-compared pairs. Records keep their given order.
pub fn summarize(records: Vec<PairRecord>, config: &PipelineConfig) -> Result<EvaluationReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::NoResponses);
    }
    let mut per_subject: BTreeMap<&str, Vec<&PairRecord>> = BTreeMap::new();
    for r in &records {
        per_subject.entry(r.subject_id.as_str()).or_default().push(r);
    }
    let subjects: Vec<SubjectSummary> = per_subject
        .iter()
        .map(|(id, rs)| {
            let n = rs.len() as f64;
            SubjectSummary {
                subject_id: id.to_string(),
                cases: rs.len(),
                mean_os_sim: rs.iter().map(|r| r.os_sim).sum::<f64>() / n,
                first_acc: rs.iter().filter(|r| r.first_match).count() as f64 / n,
            }
        })
        .collect();

    let subject_os: Vec<f64> = subjects.iter().map(|s| s.mean_os_sim).collect();
    let subject_first: Vec<f64> = subjects.iter().map(|s| s.first_acc).collect();
    let pooled: Vec<f64> = records.iter().map(|r| r.os_sim).collect();
    let (os_mm, os_mm_sd) = mean_and_sd(&subject_os);
    let (fa_mm, fa_mm_sd) = mean_and_sd(&subject_first);
    let (os_pool, os_pool_sd) = mean_and_sd(&pooled);
    let first_acc = records.iter().filter(|r| r.first_match).count() as f64 / records.len() as f64;

    Ok(EvaluationReport {
        method: config.method,
        variant: config.variant,
        w: config.scoring.w(),
        records,
        subjects,
        os_sim_mean_of_means: os_mm,
        os_sim_subject_sd: os_mm_sd,
        os_sim_pooled: os_pool,
        os_sim_pooled_sd: os_pool_sd,
        first_acc,
        first_acc_mean_of_means: fa_mm,
        first_acc_subject_sd: fa_mm_sd,
    })
}

/// Ranks every responded case with the responding subject's preferences and
/// compares the model order to the human one.
pub fn evaluate(
    cases: &[DecisionCase],
    prefs: &Preferences,
    responses: &[Response],
    config: &PipelineConfig,
) -> Result<EvaluationReport, EvalError> {
    if responses.is_empty() {
        return Err(EvalError::NoResponses);
    }
    let by_id: HashMap<&str, &DecisionCase> = cases.iter().map(|c| (c.scenario_id(), c)).collect();
    let records = responses
        .iter()
        .map(|resp| {
            let case = by_id
                .get(resp.scenario_id.as_str())
                .ok_or_else(|| EvalError::UnknownScenario(resp.scenario_id.clone()))?;
            let subject_prefs = prefs
                .get(&resp.subject_id)
                .ok_or_else(|| EvalError::MissingPreferences(resp.subject_id.clone()))?;
            let ranked = rank_variant(config.variant, config.method, case, subject_prefs, &config.scoring)?;
            Ok(compare(
                &resp.subject_id,
                &resp.scenario_id,
                ranked.result.order,
                resp.ranking.clone(),
            )?)
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    summarize(records, config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdAccuracy {
    pub threshold: f64,
    pub avg_acc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub samples: usize,
    pub dimensions: usize,
    pub accuracy: Vec<ThresholdAccuracy>,
    pub mae: f64,
}

pub fn accuracy_report(pred: &ScorePrediction, thresholds: &[f64]) -> Result<AccuracyReport, MetricError> {
    let (rows, cols) = pred.shape();
    let accuracy = thresholds
        .iter()
        .map(|&t| Ok(ThresholdAccuracy { threshold: t, avg_acc: avg_acc(pred, t)? }))
        .collect::<Result<_, MetricError>>()?;
    Ok(AccuracyReport {
        samples: rows,
        dimensions: cols,
        accuracy,
        mae: mae(pred),
    })
}
