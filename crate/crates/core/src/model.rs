//! Domain types shared by the scoring, ranking and evaluation stages.
//!
//! Validated types ([`DimensionSet`], [`ObjectiveScores`], [`PreferenceVector`],
//! [`DecisionCase`]) can only be built through checked constructors, so every
//! downstream stage may assume uniform vector lengths and in-range values.
//! [`CaseRecord`] is the unchecked form used at the I/O boundary; it is turned
//! into a [`DecisionCase`] through [`validate_case`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// The six value dimensions of the default profile.
pub const DEFAULT_DIMENSIONS: [&str; 6] = [
    "Curiosity",
    "Energy",
    "Security",
    "Happiness",
    "Intimacy",
    "Fairness",
];

/// Ordered, duplicate-free list of value dimension labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DimensionSet {
    names: Vec<String>,
}

impl DimensionSet {
    pub fn new<I, S>(names: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::EmptyDimensions);
        }
        let mut seen = HashSet::new();
        for (index, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(ModelError::BlankDimension { index });
            }
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateDimension(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// Curiosity, Energy, Security, Happiness, Intimacy, Fairness.
    pub fn default_six() -> Self {
        Self {
            names: DEFAULT_DIMENSIONS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    fn check_len(&self, what: &'static str, got: usize) -> Result<(), ModelError> {
        if got != self.len() {
            return Err(ModelError::LengthMismatch {
                what,
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for DimensionSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        DimensionSet::new(names).map_err(serde::de::Error::custom)
    }
}

/// Per-dimension alignment scores in `[-1, 1]` for a scenario or an action.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ObjectiveScores(Vec<f64>);

impl ObjectiveScores {
    pub fn new(values: Vec<f64>, dims: &DimensionSet) -> Result<Self, ModelError> {
        dims.check_len("objective scores", values.len())?;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
                return Err(ModelError::OutOfRange {
                    what: "objective score",
                    index,
                    value,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self(values))
    }

    pub fn zeros(dims: &DimensionSet) -> Self {
        Self(vec![0.0; dims.len()])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A user's self-reported importance weights in `[0, 1]`, one per dimension.
///
/// The sigmoid-transformed form depends on the scoring configuration and is
/// computed on demand by [`crate::scoring::transform_preference`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PreferenceVector(Vec<f64>);

impl PreferenceVector {
    pub fn new(raw: Vec<f64>, dims: &DimensionSet) -> Result<Self, ModelError> {
        dims.check_len("preferences", raw.len())?;
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(ModelError::OutOfRange {
                    what: "preference",
                    index,
                    value,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self(raw))
    }

    pub fn raw(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionCandidate {
    pub id: String,
    pub text: String,
    pub scores: ObjectiveScores,
}

/// A scenario and its candidate actions, all scored on the same dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionCase {
    scenario_id: String,
    scenario_text: String,
    dimensions: DimensionSet,
    scenario_scores: ObjectiveScores,
    actions: Vec<ActionCandidate>,
}

impl DecisionCase {
    pub fn scenario_id(&self) -> &str {
        &self.scenario_id
    }

    pub fn scenario_text(&self) -> &str {
        &self.scenario_text
    }

    pub fn dimensions(&self) -> &DimensionSet {
        &self.dimensions
    }

    pub fn scenario_scores(&self) -> &ObjectiveScores {
        &self.scenario_scores
    }

    pub fn actions(&self) -> &[ActionCandidate] {
        &self.actions
    }

    pub fn action_ids(&self) -> impl DoubleEndedIterator<Item = &str> + ExactSizeIterator {
        self.actions.iter().map(|a| a.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Returns a copy with the scenario scores replaced.
    pub fn with_scenario_scores(&self, scores: ObjectiveScores) -> Result<Self, ModelError> {
        self.dimensions.check_len("scenario scores", scores.len())?;
        Ok(Self {
            scenario_scores: scores,
            ..self.clone()
        })
    }

    /// Returns a copy with every action's scores replaced, in action order.
    pub fn with_action_scores(&self, scores: Vec<ObjectiveScores>) -> Result<Self, ModelError> {
        if scores.len() != self.actions.len() {
            return Err(ModelError::LengthMismatch {
                what: "action score rows",
                expected: self.actions.len(),
                got: scores.len(),
            });
        }
        let mut actions = self.actions.clone();
        for (action, row) in actions.iter_mut().zip(scores) {
            self.dimensions.check_len("action scores", row.len())?;
            action.scores = row;
        }
        Ok(Self {
            actions,
            ..self.clone()
        })
    }

    /// Returns a copy with the actions reordered by `permutation`
    /// (`permutation[k]` is the old index of the new k-th action).
    pub fn permuted(&self, permutation: &[usize]) -> Result<Self, ModelError> {
        let n = self.actions.len();
        let mut seen = vec![false; n];
        if permutation.len() != n
            || permutation
                .iter()
                .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
        {
            return Err(ModelError::InvalidPermutation);
        }
        Ok(Self {
            actions: permutation.iter().map(|&i| self.actions[i].clone()).collect(),
            ..self.clone()
        })
    }

    pub fn to_record(&self) -> CaseRecord {
        CaseRecord {
            scenario_id: self.scenario_id.clone(),
            scenario_text: self.scenario_text.clone(),
            dimensions: self.dimensions.names.clone(),
            scenario_scores: self.scenario_scores.0.clone(),
            actions: self
                .actions
                .iter()
                .map(|a| ActionRecord {
                    id: a.id.clone(),
                    text: a.text.clone(),
                    scores: a.scores.0.clone(),
                })
                .collect(),
        }
    }
}

/// Unchecked case as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub scenario_id: String,
    pub scenario_text: String,
    pub dimensions: Vec<String>,
    pub scenario_scores: Vec<f64>,
    pub actions: Vec<ActionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub id: String,
    pub text: String,
    pub scores: Vec<f64>,
}

/// One problem found by [`validate_case`]. `field` is a path such as
/// `actions[2].scores[4]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }
}

fn check_scores(report: &mut ValidationReport, path: &str, owner: &str, values: &[f64], dims: &DimensionSet) {
    if values.len() != dims.len() {
        report.push(
            path,
            format!(
                "length mismatch: {owner} has {} scores but there are {} dimensions",
                values.len(),
                dims.len()
            ),
        );
    }
    for (j, &value) in values.iter().enumerate() {
        if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
            let dim = dims.name(j).unwrap_or("?");
            report.push(
                format!("{path}[{j}]"),
                format!("score out of [-1,1]: {owner} has {value} on dimension {dim}"),
            );
        }
    }
}

/// Checks a raw case against `dims`, collecting every violation.
pub fn validate_case(record: &CaseRecord, dims: &DimensionSet) -> ValidationReport {
    let mut report = ValidationReport::default();
    if record.dimensions != dims.names {
        report.push(
            "dimensions",
            format!(
                "dimension labels {:?} differ from expected {:?}",
                record.dimensions, dims.names
            ),
        );
    }
    check_scores(
        &mut report,
        "scenario_scores",
        &format!("scenario {}", record.scenario_id),
        &record.scenario_scores,
        dims,
    );
    if record.actions.is_empty() {
        report.push("actions", "empty action list");
    }
    let mut seen = HashSet::new();
    for (i, action) in record.actions.iter().enumerate() {
        if !seen.insert(action.id.as_str()) {
            report.push(
                format!("actions[{i}].id"),
                format!("duplicate action id {:?}", action.id),
            );
        }
        check_scores(
            &mut report,
            &format!("actions[{i}].scores"),
            &format!("action {}", action.id),
            &action.scores,
            dims,
        );
    }
    report
}

impl DecisionCase {
    /// Builds a case from a raw record, failing with the full report if
    /// [`validate_case`] finds anything.
    pub fn from_record(record: CaseRecord, dims: &DimensionSet) -> Result<Self, ModelError> {
        let report = validate_case(&record, dims);
        if !report.is_ok() {
            return Err(ModelError::InvalidCase(report));
        }
        Ok(Self {
            scenario_id: record.scenario_id,
            scenario_text: record.scenario_text,
            dimensions: dims.clone(),
            scenario_scores: ObjectiveScores(record.scenario_scores),
            actions: record
                .actions
                .into_iter()
                .map(|a| ActionCandidate {
                    id: a.id,
                    text: a.text,
                    scores: ObjectiveScores(a.scores),
                })
                .collect(),
        })
    }
}

/// Final contextualized scores, one row per action and one column per dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ScoreMatrix {
    rows: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let Some(width) = rows.first().map(Vec::len) else {
            return Err(ModelError::EmptyActions);
        };
        if width == 0 {
            return Err(ModelError::EmptyDimensions);
        }
        for row in &rows {
            if row.len() != width {
                return Err(ModelError::LengthMismatch {
                    what: "score matrix row",
                    expected: width,
                    got: row.len(),
                });
            }
            if let Some((index, &value)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(ModelError::NonFinite {
                    what: "score matrix entry",
                    index,
                    value,
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn actions(&self) -> usize {
        self.rows.len()
    }

    pub fn dimensions(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, action: usize, dim: usize) -> f64 {
        self.rows[action][dim]
    }

    pub fn row(&self, action: usize) -> &[f64] {
        &self.rows[action]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, dim: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[dim])
    }
}

/// Ordered actions plus the per-action key they were sorted by.
///
/// `flows` is indexed by the case's original action order. For the outranking
/// backend it holds net flows and `positive_flows` / `negative_flows` are set;
/// the other backends store their own score (utility, closeness, priority).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub method: String,
    pub order: Vec<String>,
    pub action_ids: Vec<String>,
    pub flows: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_flows: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_flows: Option<Vec<f64>>,
}

impl RankingResult {
    /// Sorts by `flows` descending; equal keys keep ascending input index.
    pub fn from_scores(
        method: impl Into<String>,
        action_ids: Vec<String>,
        flows: Vec<f64>,
        positive_flows: Option<Vec<f64>>,
        negative_flows: Option<Vec<f64>>,
    ) -> Self {
        let order = sort_descending(&flows)
            .into_iter()
            .map(|i| action_ids[i].clone())
            .collect();
        Self {
            method: method.into(),
            order,
            action_ids,
            flows,
            positive_flows,
            negative_flows,
        }
    }

    pub fn top(&self) -> &str {
        &self.order[0]
    }

    /// Position (0 = best) of `id` in the ranking.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.order.iter().position(|o| o == id)
    }

    /// Consecutive runs of actions in `order` whose keys are exactly equal.
    pub fn tie_groups(&self) -> Vec<Vec<String>> {
        let key = |id: &str| {
            let i = self.action_ids.iter().position(|a| a == id).unwrap();
            self.flows[i]
        };
        let mut groups: Vec<Vec<String>> = Vec::new();
        let mut last: Option<f64> = None;
        for id in &self.order {
            let k = key(id);
            match (last, groups.last_mut()) {
                (Some(prev), Some(group)) if prev == k => group.push(id.clone()),
                _ => groups.push(vec![id.clone()]),
            }
            last = Some(k);
        }
        groups
    }
}

/// Indices sorted by value descending, ties by ascending index.
pub fn sort_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}
