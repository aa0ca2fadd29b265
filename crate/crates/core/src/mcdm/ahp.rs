//! Analytic Hierarchy Process over contextualized scores.
//!
//! Each dimension gets a reciprocal pairwise comparison matrix. A score
//! difference `delta = r_i - r_k` (clamped to `[-2, 2]`) maps linearly onto
//! Saaty's 1..9 scale, `a_ik = 1 + 4|delta|`, with `a_ki = 1 / a_ik`. Local
//! priorities come from normalised row geometric means (the usual
//! approximation of the principal eigenvector) and are combined across
//! dimensions with the preference weights.
//!
//! Reference: Saaty, "The Analytic Hierarchy Process" (1980).

use crate::model::ScoreMatrix;

const MAX_DIFFERENCE: f64 = 2.0;
const SCALE_SLOPE: f64 = 4.0;

/// Comparison ratio of an action scoring `r_i` against one scoring `r_k`, in `[1/9, 9]`.
pub fn comparison_ratio(r_i: f64, r_k: f64) -> f64 {
    let delta = (r_i - r_k).clamp(-MAX_DIFFERENCE, MAX_DIFFERENCE);
    let ratio = 1.0 + SCALE_SLOPE * delta.abs();
    if delta >= 0.0 {
        ratio
    } else {
        1.0 / ratio
    }
}

/// Local priority vector for one dimension, summing to 1.
pub fn local_priorities(column: &[f64]) -> Vec<f64> {
    let n = column.len() as f64;
    let geo: Vec<f64> = column
        .iter()
        .map(|&ri| {
            let log_sum: f64 = column.iter().map(|&rk| comparison_ratio(ri, rk).ln()).sum();
            (log_sum / n).exp()
        })
        .collect();
    let total: f64 = geo.iter().sum();
    geo.into_iter().map(|g| g / total).collect()
}

/// Global priority per action.
pub fn ahp(matrix: &ScoreMatrix, weights: &[f64]) -> Vec<f64> {
    let n = matrix.actions();
    let mut priority = vec![0.0; n];
    for (j, &weight) in weights.iter().enumerate() {
        let column: Vec<f64> = matrix.column(j).collect();
        for (p, local) in priority.iter_mut().zip(local_priorities(&column)) {
            *p += weight * local;
        }
    }
    priority
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ratios_are_reciprocal_and_bounded() {
        assert_eq!(comparison_ratio(0.4, 0.4), 1.0);
        assert_eq!(comparison_ratio(1.0, -1.0), 9.0);
        assert_abs_diff_eq!(comparison_ratio(-1.0, 1.0), 1.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            comparison_ratio(0.3, -0.2) * comparison_ratio(-0.2, 0.3),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn local_priorities_sum_to_one_and_follow_scores() {
        let p = local_priorities(&[0.5, -0.1, 0.2]);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(p[0] > p[2] && p[2] > p[1]);
        let flat = local_priorities(&[0.1, 0.1]);
        assert_eq!(flat, vec![0.5, 0.5]);
    }
}
