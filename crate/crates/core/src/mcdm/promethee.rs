//! Outranking with a sigmoid preference function.
//!
//! For every ordered pair of distinct actions `(i, k)` and dimension `j`,
//! `V[i][k][j] = sigmoid(r[i][j] - r[k][j])`. The aggregated preference is
//! `Vagg[i][k] = sum_j weight_j * V[i][k][j]` with the weights used as given
//! (not normalised). Flows:
//!
//! ```text
//! phi+_i = mean_{k != i} Vagg[i][k]
//! phi-_i = mean_{k != i} Vagg[k][i]
//! phi_i  = phi+_i - phi-_i
//! ```
//!
//! With a single action every flow is 0.

use serde::Serialize;

use crate::model::ScoreMatrix;
use crate::scoring::sigmoid;

/// Preference degree of an action scoring `r_i` over one scoring `r_k`.
#[inline]
pub fn pairwise_degree(r_i: f64, r_k: f64) -> f64 {
    sigmoid(r_i - r_k)
}

/// Weighted sum of per-dimension degrees, summed in dimension order.
pub fn aggregate(degrees: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(degrees.len(), weights.len());
    degrees.iter().zip(weights).fold(0.0, |acc, (&v, &p)| acc + p * v)
}

/// Pairwise preference tensors for one case.
///
/// Diagonal entries are not used by the flows; they hold the conventional
/// value 0.5 in `degrees` and the matching weighted sum in `aggregated`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwisePreference {
    pub degrees: Vec<Vec<Vec<f64>>>,
    pub aggregated: Vec<Vec<f64>>,
}

impl PairwisePreference {
    pub fn build(matrix: &ScoreMatrix, weights: &[f64]) -> Self {
        let n = matrix.actions();
        let m = matrix.dimensions();
        assert_eq!(weights.len(), m, "weight vector length must match dimensions");
        let mut degrees = vec![vec![vec![0.5; m]; n]; n];
        let mut aggregated = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    for j in 0..m {
                        degrees[i][k][j] = pairwise_degree(matrix.get(i, j), matrix.get(k, j));
                    }
                }
                aggregated[i][k] = aggregate(&degrees[i][k], weights);
            }
        }
        Self { degrees, aggregated }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flows {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub net: Vec<f64>,
}

/// Sum that depends only on the multiset of terms, so actions with equal
/// pairwise profiles get bit-identical flows regardless of their positions.
fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

pub fn net_flows(aggregated: &[Vec<f64>]) -> Flows {
    let n = aggregated.len();
    if n <= 1 {
        return Flows {
            positive: vec![0.0; n],
            negative: vec![0.0; n],
            net: vec![0.0; n],
        };
    }
    let denom = (n - 1) as f64;
    let positive: Vec<f64> = (0..n)
        .map(|i| canonical_sum((0..n).filter(|&k| k != i).map(|k| aggregated[i][k]).collect()) / denom)
        .collect();
    let negative: Vec<f64> = (0..n)
        .map(|i| canonical_sum((0..n).filter(|&k| k != i).map(|k| aggregated[k][i]).collect()) / denom)
        .collect();
    let net = positive.iter().zip(&negative).map(|(p, q)| p - q).collect();
    Flows {
        positive,
        negative,
        net,
    }
}

/// Full outranking pass over a score matrix.
pub fn promethee(matrix: &ScoreMatrix, weights: &[f64]) -> (PairwisePreference, Flows) {
    let pairwise = PairwisePreference::build(matrix, weights);
    let flows = net_flows(&pairwise.aggregated);
    (pairwise, flows)
}
