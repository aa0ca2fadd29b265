//! Ranking-alignment and score-accuracy metrics.
//!
//! Ranking metrics compare a predicted order against a reference order of
//! action ids. `os_sim` averages, over every depth `d`, the fraction of the
//! top-`d` prefixes the two orders share, which weights early positions more
//! than late ones. Spearman and Kendall are the usual rank correlations on
//! positional ranks and are included for comparison.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::Serialize;

use crate::error::MetricError;

/// A predicted and a reference ordering of the same length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankingPair<T> {
    predicted: Vec<T>,
    reference: Vec<T>,
}

fn check_distinct<T: Eq + Hash + std::fmt::Debug>(seq: &[T], which: &'static str) -> Result<(), MetricError> {
    let mut seen = HashSet::with_capacity(seq.len());
    for item in seq {
        if !seen.insert(item) {
            return Err(MetricError::DuplicateElement(format!("{item:?}"), which));
        }
    }
    Ok(())
}

impl<T: Eq + Hash + Clone + std::fmt::Debug> RankingPair<T> {
    pub fn new(predicted: Vec<T>, reference: Vec<T>) -> Result<Self, MetricError> {
        if predicted.len() != reference.len() {
            return Err(MetricError::LengthMismatch {
                predicted: predicted.len(),
                reference: reference.len(),
            });
        }
        if predicted.is_empty() {
            return Err(MetricError::EmptySequence);
        }
        check_distinct(&predicted, "predicted")?;
        check_distinct(&reference, "reference")?;
        Ok(Self { predicted, reference })
    }

    pub fn predicted(&self) -> &[T] {
        &self.predicted
    }

    pub fn reference(&self) -> &[T] {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicted.is_empty()
    }

    /// True when both orders contain the same elements.
    pub fn is_permutation(&self) -> bool {
        let a: HashSet<&T> = self.predicted.iter().collect();
        self.reference.iter().all(|x| a.contains(x))
    }

    pub fn first_match(&self) -> bool {
        self.predicted[0] == self.reference[0]
    }
}

/// Order-sensitive prefix similarity in `[0, 1]`.
///
/// Element sets may differ; overlap is counted by intersection.
pub fn os_sim<T: Eq + Hash + Clone + std::fmt::Debug>(pair: &RankingPair<T>) -> f64 {
    let n = pair.len();
    let mut seen_pred: HashSet<&T> = HashSet::with_capacity(n);
    let mut seen_ref: HashSet<&T> = HashSet::with_capacity(n);
    let mut shared = 0usize;
    let mut total = 0.0;
    for (d, (p, r)) in pair.predicted.iter().zip(&pair.reference).enumerate() {
        // each new element joins the intersection once the other prefix holds it
        if p == r {
            shared += 1;
        } else {
            if seen_ref.contains(p) {
                shared += 1;
            }
            if seen_pred.contains(r) {
                shared += 1;
            }
        }
        seen_pred.insert(p);
        seen_ref.insert(r);
        total += shared as f64 / (d + 1) as f64;
    }
    total / n as f64
}

/// Mean OS-Sim over a list of pairs.
pub fn os_sim_mean<T: Eq + Hash + Clone + std::fmt::Debug>(pairs: &[RankingPair<T>]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyPairs);
    }
    Ok(pairs.iter().map(os_sim).sum::<f64>() / pairs.len() as f64)
}

/// Fraction of pairs whose top elements agree.
pub fn first_acc<T: Eq + Hash + Clone + std::fmt::Debug>(pairs: &[RankingPair<T>]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyPairs);
    }
    let hits = pairs.iter().filter(|p| p.first_match()).count();
    Ok(hits as f64 / pairs.len() as f64)
}

fn positional_ranks<T: Eq + Hash + Clone + std::fmt::Debug>(pair: &RankingPair<T>) -> Result<(Vec<f64>, Vec<f64>), MetricError> {
    if !pair.is_permutation() {
        return Err(MetricError::ElementSetMismatch);
    }
    let reference_pos: HashMap<&T, usize> = pair.reference.iter().enumerate().map(|(i, x)| (x, i)).collect();
    // rank of each element under both orders, indexed by reference position
    let mut pred_rank = vec![0.0; pair.len()];
    for (i, x) in pair.predicted.iter().enumerate() {
        pred_rank[reference_pos[x]] = i as f64;
    }
    let ref_rank = (0..pair.len()).map(|i| i as f64).collect();
    Ok((pred_rank, ref_rank))
}

/// Spearman's rho, `1 - 6 sum(d^2) / (n (n^2 - 1))`. Defined as 1 for `n = 1`.
pub fn spearman<T: Eq + Hash + Clone + std::fmt::Debug>(pair: &RankingPair<T>) -> Result<f64, MetricError> {
    let (a, b) = positional_ranks(pair)?;
    let n = a.len() as f64;
    if a.len() < 2 {
        return Ok(1.0);
    }
    let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)))
}

/// Kendall's tau-a, `(concordant - discordant) / (n (n - 1) / 2)`. Defined as 1 for `n = 1`.
pub fn kendall<T: Eq + Hash + Clone + std::fmt::Debug>(pair: &RankingPair<T>) -> Result<f64, MetricError> {
    let (a, b) = positional_ranks(pair)?;
    let n = a.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut net = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let s = (a[i] - a[j]).signum() * (b[i] - b[j]).signum();
            net += s as i64;
        }
    }
    Ok(net as f64 / (n * (n - 1) / 2) as f64)
}

/// Predicted and gold per-dimension scores, one row per sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScorePrediction {
    predicted: Vec<Vec<f64>>,
    gold: Vec<Vec<f64>>,
}

impl ScorePrediction {
    pub fn new(predicted: Vec<Vec<f64>>, gold: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let shape = |m: &[Vec<f64>]| (m.len(), m.first().map_or(0, Vec::len));
        let (pr, pc) = shape(&predicted);
        let (gr, gc) = shape(&gold);
        let ragged = |m: &[Vec<f64>], c| m.iter().any(|r| r.len() != c);
        if pr != gr || pc != gc || ragged(&predicted, pc) || ragged(&gold, gc) {
            return Err(MetricError::ShapeMismatch {
                predicted_rows: pr,
                predicted_cols: pc,
                gold_rows: gr,
                gold_cols: gc,
            });
        }
        if pr == 0 || pc == 0 {
            return Err(MetricError::EmptyMatrix);
        }
        Ok(Self { predicted, gold })
    }

    fn abs_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.predicted
            .iter()
            .flatten()
            .zip(self.gold.iter().flatten())
            .map(|(p, g)| (p - g).abs())
    }

    /// (samples, dimensions)
    pub fn shape(&self) -> (usize, usize) {
        (self.predicted.len(), self.predicted[0].len())
    }

    fn entries(&self) -> usize {
        self.predicted.len() * self.predicted[0].len()
    }
}

/// Share of entries whose absolute error is strictly below `t`.
pub fn avg_acc(pred: &ScorePrediction, t: f64) -> Result<f64, MetricError> {
    if t.is_nan() || t <= 0.0 {
        return Err(MetricError::InvalidThreshold(t));
    }
    let hits = pred.abs_errors().filter(|&e| e < t).count();
    Ok(hits as f64 / pred.entries() as f64)
}

pub fn mae(pred: &ScorePrediction) -> f64 {
    pred.abs_errors().sum::<f64>() / pred.entries() as f64
}

/// Arithmetic mean and sample standard deviation (n - 1 denominator; 0 for n < 2).
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
