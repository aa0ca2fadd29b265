//! Ranking backends. All of them take the same contextualized score matrix
//! and per-dimension weights, so comparisons isolate the ranking stage.

pub mod ahp;
pub mod promethee;
pub mod topsis;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{RankingResult, ScoreMatrix};

pub use promethee::{aggregate, net_flows, pairwise_degree, promethee, Flows, PairwisePreference};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Promethee,
    Ahp,
    Maut,
    Topsis,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Promethee, Method::Ahp, Method::Maut, Method::Topsis];

    pub fn label(self) -> &'static str {
        match self {
            Method::Promethee => "promethee",
            Method::Ahp => "ahp",
            Method::Maut => "maut",
            Method::Topsis => "topsis",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| ModelError::UnknownName {
                kind: "method",
                value: s.to_string(),
                expected: "promethee, ahp, maut, topsis",
            })
    }
}

/// Additive utility: `u_i = sum_j weight_j * r_ij`.
pub fn maut(matrix: &ScoreMatrix, weights: &[f64]) -> Vec<f64> {
    matrix
        .rows()
        .iter()
        .map(|row| row.iter().zip(weights).fold(0.0, |acc, (&r, &w)| acc + w * r))
        .collect()
}

/// Ranks the rows of `matrix`. The pairwise tensors are returned for the
/// outranking backend only.
pub fn rank_matrix(
    method: Method,
    matrix: &ScoreMatrix,
    weights: &[f64],
    action_ids: Vec<String>,
) -> (RankingResult, Option<PairwisePreference>) {
    match method {
        Method::Promethee => {
            let (pairwise, flows) = promethee(matrix, weights);
            let result = RankingResult::from_scores(
                method.label(),
                action_ids,
                flows.net,
                Some(flows.positive),
                Some(flows.negative),
            );
            (result, Some(pairwise))
        }
        Method::Ahp => (
            RankingResult::from_scores(method.label(), action_ids, ahp::ahp(matrix, weights), None, None),
            None,
        ),
        Method::Maut => (
            RankingResult::from_scores(method.label(), action_ids, maut(matrix, weights), None, None),
            None,
        ),
        Method::Topsis => (
            RankingResult::from_scores(method.label(), action_ids, topsis::topsis(matrix, weights), None, None),
            None,
        ),
    }
}
