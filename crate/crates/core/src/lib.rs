//! Preference-aware ranking of candidate actions.
//!
//! A [`model::DecisionCase`] holds a scenario and its candidate actions, each
//! with objective scores in `[-1, 1]` on a set of value dimensions. Given a
//! user's importance weights ([`model::PreferenceVector`]), [`scoring`]
//! builds a contextualized score matrix and [`mcdm`] ranks the actions,
//! by default with sigmoid-preference outranking flows. [`variants`] wires the
//! two together and provides the ablated pipelines; [`metrics`] and
//! [`harness`] compare rankings with human responses.

pub mod assessor;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod mcdm;
pub mod metrics;
pub mod model;
pub mod scoring;
pub mod variants;

pub use error::{MetricError, ModelError};
pub use mcdm::Method;
pub use model::{
    validate_case, ActionCandidate, CaseRecord, DecisionCase, DimensionSet, ObjectiveScores,
    PreferenceVector, RankingResult, ScoreMatrix, ValidationReport,
};
pub use scoring::{score_case, ScoringConfig};
pub use variants::{rank_ahp, rank_maut, rank_promethee, rank_topsis, rank_variant, Variant};
