//! Contextualized scoring: turns objective scores and a user's preferences
//! into the action-by-dimension matrix consumed by the ranking backends.
//!
//! Per dimension `j` the pipeline is
//!
//! ```text
//! p'_j  = 1 / (1 + exp(-(p_j - 0.5) * scale))
//! d_j   = 1 - | |rho_j| - p'_j |                 (scenario and each action)
//! r_j   = w * d_j + (1 - w) * rho_j
//! r_ij  = 1 / (1 + exp(-|r^s_j|)) * r^{a_i}_j
//! ```
//!
//! All intermediates are kept in [`ScoredCase`] so callers can explain a
//! ranking.

use serde::Serialize;

use crate::error::ModelError;
use crate::model::{DecisionCase, PreferenceVector, ScoreMatrix};

pub const DEFAULT_WEIGHT: f64 = 0.3;
pub const DEFAULT_SIGMOID_SCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoringConfig {
    w: f64,
    sigmoid_scale: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            w: DEFAULT_WEIGHT,
            sigmoid_scale: DEFAULT_SIGMOID_SCALE,
        }
    }
}

impl ScoringConfig {
    /// Out-of-range values are rejected, never clamped.
    pub fn new(w: f64, sigmoid_scale: f64) -> Result<Self, ModelError> {
        if !w.is_finite() || !(0.0..=1.0).contains(&w) {
            return Err(ModelError::InvalidWeight(w));
        }
        if !sigmoid_scale.is_finite() || sigmoid_scale <= 0.0 {
            return Err(ModelError::InvalidSigmoidScale(sigmoid_scale));
        }
        Ok(Self { w, sigmoid_scale })
    }

    pub fn with_weight(w: f64) -> Result<Self, ModelError> {
        Self::new(w, DEFAULT_SIGMOID_SCALE)
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn sigmoid_scale(&self) -> f64 {
        self.sigmoid_scale
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Sigmoid transform of raw preferences, centred at 0.5.
pub fn transform_preference(raw: &[f64], config: &ScoringConfig) -> Result<Vec<f64>, ModelError> {
    raw.iter()
        .enumerate()
        .map(|(index, &p)| {
            if !p.is_finite() {
                return Err(ModelError::NonFinite {
                    what: "preference",
                    index,
                    value: p,
                });
            }
            Ok(sigmoid((p - 0.5) * config.sigmoid_scale))
        })
        .collect()
}

/// How well the magnitude of an objective score matches a transformed preference.
#[inline]
pub fn discrepancy(rho: f64, p_prime: f64) -> f64 {
    1.0 - (rho.abs() - p_prime).abs()
}

#[inline]
pub fn integrate(d: f64, rho: f64, config: &ScoringConfig) -> f64 {
    config.w * d + (1.0 - config.w) * rho
}

/// Scales an action's integrated score by the scenario's relevance on that dimension.
#[inline]
pub fn contextualize(r_scenario: f64, r_action: f64) -> f64 {
    sigmoid(r_scenario.abs()) * r_action
}

/// Which stages of the scoring pipeline run. Ablated pipelines switch one off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringStages {
    /// When false the integrated score is the objective score itself.
    pub subjective: bool,
    /// When false the final score is the action's integrated score, unscaled.
    pub scenario_scaling: bool,
}

impl Default for ScoringStages {
    fn default() -> Self {
        Self {
            subjective: true,
            scenario_scaling: true,
        }
    }
}

/// Score matrix plus every intermediate produced on the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredCase {
    pub transformed_preferences: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_discrepancy: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action_discrepancy: Option<Vec<Vec<f64>>>,
    pub scenario_integrated: Vec<f64>,
    pub action_integrated: Vec<Vec<f64>>,
    pub matrix: ScoreMatrix,
}

pub fn score_case(
    case: &DecisionCase,
    prefs: &PreferenceVector,
    config: &ScoringConfig,
) -> Result<ScoredCase, ModelError> {
    score_case_with(case, prefs, config, ScoringStages::default())
}

pub fn score_case_with(
    case: &DecisionCase,
    prefs: &PreferenceVector,
    config: &ScoringConfig,
    stages: ScoringStages,
) -> Result<ScoredCase, ModelError> {
    let m = case.dimensions().len();
    if prefs.len() != m {
        return Err(ModelError::LengthMismatch {
            what: "preferences",
            expected: m,
            got: prefs.len(),
        });
    }
    let p_prime = transform_preference(prefs.raw(), config)?;

    let discrepancies = |rho: &[f64]| -> Vec<f64> {
        rho.iter().zip(&p_prime).map(|(&r, &p)| discrepancy(r, p)).collect()
    };
    let integrated = |rho: &[f64], d: Option<&Vec<f64>>| -> Vec<f64> {
        match d {
            Some(d) => rho.iter().zip(d).map(|(&r, &d)| integrate(d, r, config)).collect(),
            None => rho.to_vec(),
        }
    };

    let scenario_rho = case.scenario_scores().values();
    let (scenario_d, action_d) = if stages.subjective {
        (
            Some(discrepancies(scenario_rho)),
            Some(
                case.actions()
                    .iter()
                    .map(|a| discrepancies(a.scores.values()))
                    .collect::<Vec<_>>(),
            ),
        )
    } else {
        (None, None)
    };

    let scenario_r = integrated(scenario_rho, scenario_d.as_ref());
    let action_r: Vec<Vec<f64>> = case
        .actions()
        .iter()
        .enumerate()
        .map(|(i, a)| integrated(a.scores.values(), action_d.as_ref().map(|d| &d[i])))
        .collect();

    let rows = action_r
        .iter()
        .map(|row| {
            if stages.scenario_scaling {
                row.iter()
                    .zip(&scenario_r)
                    .map(|(&ra, &rs)| contextualize(rs, ra))
                    .collect()
            } else {
                row.clone()
            }
        })
        .collect();

    Ok(ScoredCase {
        transformed_preferences: p_prime,
        scenario_discrepancy: scenario_d,
        action_discrepancy: action_d,
        scenario_integrated: scenario_r,
        action_integrated: action_r,
        matrix: ScoreMatrix::from_rows(rows)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionRecord, CaseRecord, DimensionSet};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cfg() -> ScoringConfig {
        ScoringConfig::default()
    }

    #[test]
    fn preference_transform_values() {
        let p = transform_preference(&[0.5, 1.0, 0.0], &cfg()).unwrap();
        assert_eq!(p[0], 0.5);
        // 1 / (1 + e^-5) and its complement
        assert_abs_diff_eq!(p[1], 0.993307, epsilon = 1e-6);
        assert_abs_diff_eq!(p[2], 0.006693, epsilon = 1e-6);
        assert!(transform_preference(&[f64::INFINITY], &cfg()).is_err());
    }

    #[test]
    fn discrepancy_values() {
        assert_abs_diff_eq!(discrepancy(0.8, 0.8), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(discrepancy(-0.8, 0.8), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(discrepancy(0.2, 0.9), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn integrate_values() {
        assert_abs_diff_eq!(integrate(1.0, 1.0, &cfg()), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(integrate(0.3, 0.2, &cfg()), 0.23, epsilon = 1e-12);
        let objective = ScoringConfig::with_weight(0.0).unwrap();
        assert_eq!(integrate(0.77, 0.42, &objective), 0.42);
    }

    #[test]
    fn contextualize_values() {
        assert_abs_diff_eq!(contextualize(0.0, 0.4), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(contextualize(1.0, 0.23), 0.168144, epsilon = 1e-5);
        assert_eq!(contextualize(-0.7, 0.0), 0.0);
    }

    #[test]
    fn config_rejects_out_of_range() {
        assert!(ScoringConfig::with_weight(1.5).is_err());
        assert!(ScoringConfig::with_weight(-0.01).is_err());
        assert!(ScoringConfig::new(0.3, 0.0).is_err());
        assert!(ScoringConfig::with_weight(1.0).is_ok());
    }

    fn case_of(dims: &DimensionSet, scenario: Vec<f64>, actions: Vec<Vec<f64>>) -> DecisionCase {
        let record = CaseRecord {
            scenario_id: "s".into(),
            scenario_text: String::new(),
            dimensions: dims.names().to_vec(),
            scenario_scores: scenario,
            actions: actions
                .into_iter()
                .enumerate()
                .map(|(i, scores)| ActionRecord {
                    id: format!("a{i}"),
                    text: String::new(),
                    scores,
                })
                .collect(),
        };
        DecisionCase::from_record(record, dims).unwrap()
    }

    #[test]
    fn single_cell_composition() {
        // Step by step: p' = 0.5; d = 1 - |0 - 0.5| = 0.5; r = 0.3 * 0.5 = 0.15
        // for scenario and action; scale = 1 / (1 + e^-0.15).
        let dims = DimensionSet::new(["x"]).unwrap();
        let case = case_of(&dims, vec![0.0], vec![vec![0.0]]);
        let prefs = PreferenceVector::new(vec![0.5], &dims).unwrap();
        let scored = score_case(&case, &prefs, &cfg()).unwrap();
        let scale = 1.0 / (1.0 + (-0.15f64).exp());
        assert_abs_diff_eq!(scale, 0.537430, epsilon = 1e-6);
        assert_abs_diff_eq!(scored.matrix.get(0, 0), scale * 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(scored.matrix.get(0, 0), 0.080614, epsilon = 1e-6);
    }

    #[test]
    fn objective_only_with_neutral_scenario_halves_scores() {
        let dims = DimensionSet::new(["x", "y", "z"]).unwrap();
        let rows = vec![vec![0.4, -0.9, 1.0], vec![-0.1, 0.0, 0.33]];
        let case = case_of(&dims, vec![0.0; 3], rows.clone());
        let prefs = PreferenceVector::new(vec![0.9, 0.1, 0.5], &dims).unwrap();
        let scored = score_case(&case, &prefs, &ScoringConfig::with_weight(0.0).unwrap()).unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (j, &rho) in row.iter().enumerate() {
                assert_abs_diff_eq!(scored.matrix.get(i, j), 0.5 * rho, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn identical_actions_give_identical_rows() {
        let dims = DimensionSet::new(["x", "y"]).unwrap();
        let case = case_of(&dims, vec![0.3, -0.6], vec![vec![0.2, 0.1], vec![0.7, -0.3], vec![0.2, 0.1]]);
        let prefs = PreferenceVector::new(vec![0.8, 0.3], &dims).unwrap();
        let scored = score_case(&case, &prefs, &cfg()).unwrap();
        assert_eq!(scored.matrix.row(0), scored.matrix.row(2));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let dims = DimensionSet::new(["x", "y"]).unwrap();
        let case = case_of(&dims, vec![0.0, 0.0], vec![vec![0.0, 0.0]]);
        let other = DimensionSet::new(["x"]).unwrap();
        let prefs = PreferenceVector::new(vec![0.5], &other).unwrap();
        assert!(matches!(
            score_case(&case, &prefs, &cfg()),
            Err(ModelError::LengthMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn transform_is_symmetric(p in 0.0f64..=1.0) {
            let a = transform_preference(&[p, 1.0 - p], &cfg()).unwrap();
            prop_assert!((a[0] + a[1] - 1.0).abs() <= 1e-12);
            prop_assert!(a[0] > 0.0 && a[0] < 1.0);
        }

        #[test]
        fn transform_is_increasing(p in 0.0f64..0.99, dp in 0.001f64..0.01) {
            let a = transform_preference(&[p, p + dp], &cfg()).unwrap();
            prop_assert!(a[1] > a[0]);
        }

        #[test]
        fn discrepancy_in_unit_interval(rho in -1.0f64..=1.0, pp in 0.0f64..1.0) {
            let d = discrepancy(rho, pp);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d == 1.0, rho.abs() == pp);
        }

        #[test]
        fn integrate_is_monotone(
            w in 0.0f64..=1.0, d in 0.0f64..=1.0, rho in -1.0f64..=1.0,
            dd in 0.0f64..0.5, drho in 0.0f64..0.5,
        ) {
            let c = ScoringConfig::with_weight(w).unwrap();
            let base = integrate(d, rho, &c);
            prop_assert!(integrate(d + dd, rho, &c) >= base);
            prop_assert!(integrate(d, rho + drho, &c) >= base);
        }

        #[test]
        fn contextualize_preserves_sign(rs in -1.0f64..=1.0, ra in -1.0f64..=1.0) {
            let r = contextualize(rs, ra);
            prop_assert_eq!(r.signum(), ra.signum());
            let scale = sigmoid(rs.abs());
            prop_assert!((0.5..1.0).contains(&scale));
            prop_assert!(r.abs() <= 1.0);
        }

        #[test]
        fn zero_weight_reduces_to_objective(
            scen in proptest::collection::vec(-1.0f64..=1.0, 3),
            act in proptest::collection::vec(-1.0f64..=1.0, 3),
            prefs in proptest::collection::vec(0.0f64..=1.0, 3),
        ) {
            let dims = DimensionSet::new(["x", "y", "z"]).unwrap();
            let case = case_of(&dims, scen.clone(), vec![act.clone()]);
            let prefs = PreferenceVector::new(prefs, &dims).unwrap();
            let c = ScoringConfig::with_weight(0.0).unwrap();
            let scored = score_case(&case, &prefs, &c).unwrap();
            prop_assert_eq!(&scored.scenario_integrated, &scen);
            prop_assert_eq!(&scored.action_integrated[0], &act);
            let again = score_case(&case, &prefs, &c).unwrap();
            prop_assert_eq!(scored, again);
        }
    }
}
