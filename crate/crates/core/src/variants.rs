//! End-to-end ranking of a case, including the ablated pipelines.
//!
//! | variant         | scoring front end                 | aggregation weights |
//! |-----------------|-----------------------------------|---------------------|
//! | `full`          | all stages                        | transformed prefs   |
//! | `only-action`   | none: raw action scores           | 1 per dimension     |
//! | `no-preference` | all stages (prefs still used)     | 1 per dimension     |
//! | `no-subjective` | integrated score = objective      | transformed prefs   |
//! | `no-scenario`   | no scenario scaling               | transformed prefs   |
//!
//! In `no-preference` the transformed preferences still enter the
//! discrepancy term; only the aggregation step drops them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::mcdm::{rank_matrix, Method, PairwisePreference};
use crate::model::{DecisionCase, PreferenceVector, RankingResult, ScoreMatrix};
use crate::scoring::{score_case_with, transform_preference, ScoredCase, ScoringConfig, ScoringStages};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Full,
    OnlyAction,
    NoPreference,
    NoSubjective,
    NoScenario,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Full,
        Variant::OnlyAction,
        Variant::NoPreference,
        Variant::NoSubjective,
        Variant::NoScenario,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::OnlyAction => "only-action",
            Variant::NoPreference => "no-preference",
            Variant::NoSubjective => "no-subjective",
            Variant::NoScenario => "no-scenario",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.label() == s)
            .ok_or_else(|| ModelError::UnknownName {
                kind: "variant",
                value: s.to_string(),
                expected: "full, only-action, no-preference, no-subjective, no-scenario",
            })
    }
}

/// Intermediates of one ranking run, for explain output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankTrace {
    /// Absent for `only-action`, which ranks raw action scores.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scoring: Option<ScoredCase>,
    pub score_matrix: ScoreMatrix,
    pub aggregation_weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairwise: Option<PairwisePreference>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankOutcome {
    pub result: RankingResult,
    pub trace: RankTrace,
}

pub fn rank_variant(
    variant: Variant,
    method: Method,
    case: &DecisionCase,
    prefs: &PreferenceVector,
    config: &ScoringConfig,
) -> Result<RankOutcome, ModelError> {
    let m = case.dimensions().len();
    if prefs.len() != m {
        return Err(ModelError::LengthMismatch {
            what: "preferences",
            expected: m,
            got: prefs.len(),
        });
    }
    let ids: Vec<String> = case.action_ids().map(str::to_string).collect();

    let (scoring, matrix, weights) = match variant {
        Variant::OnlyAction => {
            let rows = case.actions().iter().map(|a| a.scores.values().to_vec()).collect();
            (None, ScoreMatrix::from_rows(rows)?, vec![1.0; m])
        }
        Variant::NoPreference => {
            let scored = score_case_with(case, prefs, config, ScoringStages::default())?;
            let matrix = scored.matrix.clone();
            (Some(scored), matrix, vec![1.0; m])
        }
        Variant::Full | Variant::NoSubjective | Variant::NoScenario => {
            let stages = ScoringStages {
                subjective: variant != Variant::NoSubjective,
                scenario_scaling: variant != Variant::NoScenario,
            };
            let scored = score_case_with(case, prefs, config, stages)?;
            let matrix = scored.matrix.clone();
            let weights = scored.transformed_preferences.clone();
            (Some(scored), matrix, weights)
        }
    };

    let (result, pairwise) = rank_matrix(method, &matrix, &weights, ids);
    Ok(RankOutcome {
        result,
        trace: RankTrace {
            scoring,
            score_matrix: matrix,
            aggregation_weights: weights,
            pairwise,
        },
    })
}

pub fn rank_promethee(
    case: &DecisionCase,
    prefs: &PreferenceVector,
    config: &ScoringConfig,
) -> Result<RankingResult, ModelError> {
    Ok(rank_variant(Variant::Full, Method::Promethee, case, prefs, config)?.result)
}

pub fn rank_ahp(case: &DecisionCase, prefs: &PreferenceVector, config: &ScoringConfig) -> Result<RankingResult, ModelError> {
    Ok(rank_variant(Variant::Full, Method::Ahp, case, prefs, config)?.result)
}

pub fn rank_maut(case: &DecisionCase, prefs: &PreferenceVector, config: &ScoringConfig) -> Result<RankingResult, ModelError> {
    Ok(rank_variant(Variant::Full, Method::Maut, case, prefs, config)?.result)
}

pub fn rank_topsis(case: &DecisionCase, prefs: &PreferenceVector, config: &ScoringConfig) -> Result<RankingResult, ModelError> {
    Ok(rank_variant(Variant::Full, Method::Topsis, case, prefs, config)?.result)
}

/// Transformed preferences as used for aggregation by `variant`.
pub fn aggregation_weights(
    variant: Variant,
    prefs: &PreferenceVector,
    config: &ScoringConfig,
) -> Result<Vec<f64>, ModelError> {
    match variant {
        Variant::OnlyAction | Variant::NoPreference => Ok(vec![1.0; prefs.len()]),
        _ => transform_preference(prefs.raw(), config),
    }
}
