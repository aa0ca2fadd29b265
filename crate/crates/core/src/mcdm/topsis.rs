//! TOPSIS closeness to the ideal solution.
//!
//! Columns are vector-normalised, weighted by the preference weights
//! (rescaled to sum to 1), and every action is scored by
//! `D- / (D+ + D-)` where `D+` / `D-` are Euclidean distances to the
//! per-dimension best and worst values. All dimensions are benefit criteria.
//! When every action coincides (zero denominator) all actions score 0.5.
//!
//! Reference: Hwang & Yoon, "Multiple Attribute Decision Making" (1981).

use crate::model::ScoreMatrix;

pub fn topsis(matrix: &ScoreMatrix, weights: &[f64]) -> Vec<f64> {
    let n = matrix.actions();
    let m = matrix.dimensions();
    let weight_total: f64 = weights.iter().sum();
    let unit_weights: Vec<f64> = if weight_total > 0.0 {
        weights.iter().map(|w| w / weight_total).collect()
    } else {
        vec![0.0; m]
    };

    let mut weighted = vec![vec![0.0; m]; n];
    let mut best = vec![0.0; m];
    let mut worst = vec![0.0; m];
    for j in 0..m {
        let norm = matrix.column(j).map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (i, row) in weighted.iter_mut().enumerate() {
                row[j] = unit_weights[j] * matrix.get(i, j) / norm;
            }
        }
        best[j] = weighted.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        worst[j] = weighted.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
    }

    weighted
        .iter()
        .map(|row| {
            let dist = |target: &[f64]| {
                row.iter()
                    .zip(target)
                    .map(|(v, t)| (v - t) * (v - t))
                    .sum::<f64>()
                    .sqrt()
            };
            let to_best = dist(&best);
            let to_worst = dist(&worst);
            let denom = to_best + to_worst;
            if denom == 0.0 {
                0.5
            } else {
                to_worst / denom
            }
        })
        .collect()
}
