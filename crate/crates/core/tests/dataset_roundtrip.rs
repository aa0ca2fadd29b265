use std::collections::BTreeMap;

use proptest::prelude::*;
use valuerank::dataset::{
    load_cases, parse_cases, parse_preferences, parse_responses, write_cases, write_preferences,
    write_responses, DatasetError, Response,
};
use valuerank::model::{ActionRecord, CaseRecord};
use valuerank::{DecisionCase, DimensionSet, PreferenceVector};

fn dims() -> DimensionSet {
    DimensionSet::default_six()
}

fn case_strategy() -> impl Strategy<Value = CaseRecord> {
    (
        "[a-z0-9]{1,8}",
        ".{0,20}",
        proptest::collection::vec(-1.0f64..=1.0, 6),
        proptest::collection::vec((".{0,12}", proptest::collection::vec(-1.0f64..=1.0, 6)), 1..6),
    )
        .prop_map(|(id, text, scen, actions)| CaseRecord {
            scenario_id: id,
            scenario_text: text,
            dimensions: dims().names().to_vec(),
            scenario_scores: scen,
            actions: actions
                .into_iter()
                .enumerate()
                .map(|(i, (text, scores))| ActionRecord {
                    id: format!("a{i}"),
                    text,
                    scores,
                })
                .collect(),
        })
}

proptest! {
    #[test]
    fn cases_round_trip(records in proptest::collection::vec(case_strategy(), 1..5)) {
        let mut records = records;
        for (k, r) in records.iter_mut().enumerate() {
            r.scenario_id = format!("{}-{k}", r.scenario_id);
        }
        let cases: Vec<DecisionCase> = records
            .into_iter()
            .map(|r| DecisionCase::from_record(r, &dims()).unwrap())
            .collect();
        let text = write_cases(&cases);
        let back = parse_cases(&text, "mem").unwrap().cases;
        prop_assert_eq!(&back, &cases);
        let ranking: Vec<String> = cases[0].action_ids().rev().map(str::to_string).collect();
        let responses = vec![Response { subject_id: "u1".into(), scenario_id: cases[0].scenario_id().into(), ranking }];
        prop_assert_eq!(parse_responses(&write_responses(&responses), "mem", &cases).unwrap(), responses);
    }

    #[test]
    fn preferences_round_trip(raw in proptest::collection::btree_map("[a-z]{1,6}", proptest::collection::vec(0.0f64..=1.0, 6), 1..5)) {
        let prefs: BTreeMap<String, PreferenceVector> = raw
            .into_iter()
            .map(|(k, v)| (k, PreferenceVector::new(v, &dims()).unwrap()))
            .collect();
        let back = parse_preferences(&write_preferences(&prefs), "mem", &dims()).unwrap();
        prop_assert_eq!(back, prefs);
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_cases("/definitely/not/here.jsonl").unwrap_err();
    assert!(matches!(err, DatasetError::Io { .. }));
    assert!(err.to_string().contains("/definitely/not/here.jsonl"));
}

#[test]
fn loads_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cases.jsonl");
    let case = DecisionCase::from_record(
        CaseRecord {
            scenario_id: "s".into(),
            scenario_text: "t".into(),
            dimensions: dims().names().to_vec(),
            scenario_scores: vec![0.0; 6],
            actions: vec![ActionRecord { id: "a".into(), text: "x".into(), scores: vec![0.5; 6] }],
        },
        &dims(),
    )
    .unwrap();
    std::fs::write(&path, write_cases(std::slice::from_ref(&case))).unwrap();
    assert_eq!(load_cases(&path).unwrap().cases, vec![case]);
}
