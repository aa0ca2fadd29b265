//! Outranking pipeline checked against a naive re-implementation and a set of
//! structural properties.

use proptest::prelude::*;
use valuerank::mcdm::{promethee, rank_matrix};
use valuerank::model::{ActionRecord, CaseRecord};
use valuerank::{
    rank_promethee, rank_variant, score_case, DecisionCase, DimensionSet, Method, PreferenceVector,
    ScoreMatrix, ScoringConfig, Variant,
};

/// Straight-line evaluation of the scoring and flow formulas from raw inputs.
fn naive_flows(scenario: &[f64], actions: &[Vec<f64>], prefs: &[f64], w: f64) -> Vec<f64> {
    let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
    let n = actions.len();
    let m = scenario.len();
    let pp: Vec<f64> = prefs.iter().map(|p| sig((p - 0.5) * 10.0)).collect();
    let mut r = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let ds = 1.0 - (scenario[j].abs() - pp[j]).abs();
            let da = 1.0 - (actions[i][j].abs() - pp[j]).abs();
            let rs = w * ds + (1.0 - w) * scenario[j];
            let ra = w * da + (1.0 - w) * actions[i][j];
            r[i][j] = sig(rs.abs()) * ra;
        }
    }
    let mut agg = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if i != k {
                for j in 0..m {
                    agg[i][k] += pp[j] * sig(r[i][j] - r[k][j]);
                }
            }
        }
    }
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| {
            let mut plus = 0.0;
            let mut minus = 0.0;
            for k in 0..n {
                if k != i {
                    plus += agg[i][k];
                    minus += agg[k][i];
                }
            }
            (plus - minus) / (n - 1) as f64
        })
        .collect()
}

fn dims(m: usize) -> DimensionSet {
    DimensionSet::new((0..m).map(|j| format!("d{j}"))).unwrap()
}

fn build_case(scenario: &[f64], actions: &[Vec<f64>]) -> DecisionCase {
    let m = scenario.len();
    let record = CaseRecord {
        scenario_id: "s".into(),
        scenario_text: String::new(),
        dimensions: dims(m).names().to_vec(),
        scenario_scores: scenario.to_vec(),
        actions: actions
            .iter()
            .enumerate()
            .map(|(i, s)| ActionRecord {
                id: format!("a{i}"),
                text: String::new(),
                scores: s.clone(),
            })
            .collect(),
    };
    DecisionCase::from_record(record, &dims(m)).unwrap()
}

#[test]
fn hand_built_matrix_matches_high_precision_values() {
    // frozen from a 40-digit evaluation of the flow formulas
    let matrix = ScoreMatrix::from_rows(vec![
        vec![0.2, -0.1, 0.5],
        vec![0.4, 0.3, -0.2],
        vec![-0.3, 0.6, 0.1],
    ])
    .unwrap();
    let (_, flows) = promethee(&matrix, &[0.9, 0.3, 0.6]);
    let expected_pos = [0.97271271509231221, 0.92895748106746123, 0.79832980384022656];
    let expected_neg = [0.82728728490768779, 0.87104251893253877, 1.0016701961597734];
    let expected_net = [0.14542543018462442, 0.057914962134922461, -0.20334039231954688];
    for i in 0..3 {
        assert!((flows.positive[i] - expected_pos[i]).abs() <= 1e-12);
        assert!((flows.negative[i] - expected_neg[i]).abs() <= 1e-12);
        assert!((flows.net[i] - expected_net[i]).abs() <= 1e-12);
    }
}

#[test]
fn full_pipeline_matches_high_precision_values() {
    let case = build_case(
        &[0.5, -0.8, 0.1],
        &[vec![0.2, -0.1, 0.5], vec![0.4, 0.3, -0.2], vec![-0.3, 0.6, 0.1]],
    );
    let prefs = PreferenceVector::new(vec![0.9, 0.3, 0.6], &dims(3)).unwrap();
    let result = rank_promethee(&case, &prefs, &ScoringConfig::default()).unwrap();
    let expected = [0.10460590391337993, 0.036338544270076523, -0.14094444818345645];
    for (got, want) in result.flows.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
    assert_eq!(result.order, vec!["a0", "a1", "a2"]);
}

#[test]
fn dominant_action_wins() {
    let case = build_case(&[0.3, 0.3], &[vec![0.1, 0.2], vec![0.6, 0.7]]);
    let prefs = PreferenceVector::new(vec![0.2, 0.9], &dims(2)).unwrap();
    let r = rank_promethee(&case, &prefs, &ScoringConfig::default()).unwrap();
    assert_eq!(r.top(), "a1");
}

fn case_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(-1.0f64..=1.0, m),
            proptest::collection::vec(proptest::collection::vec(-1.0f64..=1.0, m), n),
            proptest::collection::vec(0.0f64..=1.0, m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_naive_implementation((scen, acts, prefs) in case_strategy(5, 3), w in 0.0f64..=1.0) {
        let case = build_case(&scen, &acts);
        let p = PreferenceVector::new(prefs.clone(), &dims(scen.len())).unwrap();
        let config = ScoringConfig::with_weight(w).unwrap();
        let got = rank_promethee(&case, &p, &config).unwrap().flows;
        let want = naive_flows(&scen, &acts, &prefs, w);
        for (g, e) in got.iter().zip(&want) {
            prop_assert!((g - e).abs() <= 1e-12, "{} vs {}", g, e);
        }
    }

    #[test]
    fn flows_sum_to_zero_and_degrees_complement((scen, acts, prefs) in case_strategy(8, 6)) {
        let case = build_case(&scen, &acts);
        let p = PreferenceVector::new(prefs, &dims(scen.len())).unwrap();
        let out = rank_variant(Variant::Full, Method::Promethee, &case, &p, &ScoringConfig::default()).unwrap();
        prop_assert!(out.result.flows.iter().sum::<f64>().abs() <= 1e-9);
        let pw = out.trace.pairwise.unwrap();
        let n = acts.len();
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    for j in 0..scen.len() {
                        prop_assert!((pw.degrees[i][k][j] + pw.degrees[k][i][j] - 1.0).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn raising_one_score_never_hurts(
        (scen, acts, prefs) in case_strategy(8, 6),
        pick in any::<(prop::sample::Index, prop::sample::Index)>(),
    ) {
        let n = acts.len();
        let m = scen.len();
        let (k, j) = (pick.0.index(n), pick.1.index(m));
        let p = PreferenceVector::new(prefs, &dims(m)).unwrap();
        let config = ScoringConfig::default();
        let before = rank_promethee(&build_case(&scen, &acts), &p, &config).unwrap();
        let mut bumped = acts.clone();
        bumped[k][j] = (bumped[k][j] + 0.1).min(1.0);
        prop_assume!(bumped[k][j] > acts[k][j]);
        let after = rank_promethee(&build_case(&scen, &bumped), &p, &config).unwrap();
        let id = format!("a{k}");
        prop_assert!(after.position(&id) <= before.position(&id));
        if n > 1 {
            prop_assert!(after.flows[k] > before.flows[k]);
            for i in (0..n).filter(|&i| i != k) {
                prop_assert!(after.flows[i] - after.flows[k] <= before.flows[i] - before.flows[k]);
            }
        }
    }

    #[test]
    fn permuting_actions_keeps_the_ranking(
        (scen, acts, prefs, perm) in case_strategy(7, 4).prop_flat_map(|(s, a, p)| {
            let n = a.len();
            (Just(s), Just(a), Just(p), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        }),
        dup in any::<bool>(),
    ) {
        let mut acts = acts;
        if dup && acts.len() > 1 {
            // force a tie group
            acts[1] = acts[0].clone();
        }
        let case = build_case(&scen, &acts);
        let p = PreferenceVector::new(prefs, &dims(scen.len())).unwrap();
        let config = ScoringConfig::default();
        let a = rank_promethee(&case, &p, &config).unwrap();
        let b = rank_promethee(&case.permuted(&perm).unwrap(), &p, &config).unwrap();
        let as_sets = |groups: Vec<Vec<String>>| {
            groups.into_iter().map(|mut g| { g.sort(); g }).collect::<Vec<_>>()
        };
        prop_assert_eq!(as_sets(a.tie_groups()), as_sets(b.tie_groups()));
    }

    #[test]
    fn zero_weight_dimensions_are_neutral(
        (scen, acts, _prefs) in case_strategy(6, 4),
        weights in proptest::collection::vec(0.0f64..=1.0, 4),
        zero_mask in proptest::collection::vec(any::<bool>(), 4),
    ) {
        let m = scen.len();
        let n = acts.len();
        let weights: Vec<f64> = (0..m).map(|j| if zero_mask[j] { 0.0 } else { weights[j] }).collect();
        let ids: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let rows: Vec<Vec<f64>> = acts.clone();
        let mut zeroed = rows.clone();
        for row in &mut zeroed {
            for j in 0..m {
                if weights[j] == 0.0 {
                    row[j] = 0.0;
                }
            }
        }
        let (a, _) = rank_matrix(Method::Promethee, &ScoreMatrix::from_rows(rows).unwrap(), &weights, ids.clone());
        let (b, _) = rank_matrix(Method::Promethee, &ScoreMatrix::from_rows(zeroed).unwrap(), &weights, ids);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scaling_weights_keeps_order((scen, acts, prefs) in case_strategy(8, 6), c in 0.01f64..100.0) {
        let case = build_case(&scen, &acts);
        let p = PreferenceVector::new(prefs, &dims(scen.len())).unwrap();
        let scored = score_case(&case, &p, &ScoringConfig::default()).unwrap();
        let ids: Vec<String> = case.action_ids().map(str::to_string).collect();
        let w = scored.transformed_preferences.clone();
        let scaled: Vec<f64> = w.iter().map(|x| x * c).collect();
        let (a, _) = rank_matrix(Method::Promethee, &scored.matrix, &w, ids.clone());
        let (b, _) = rank_matrix(Method::Promethee, &scored.matrix, &scaled, ids);
        prop_assert_eq!(a.tie_groups(), b.tie_groups());
        prop_assert_eq!(a.order, b.order);
    }
}
