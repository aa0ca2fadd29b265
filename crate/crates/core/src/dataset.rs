//! On-disk formats.
//!
//! * cases: JSONL, one object per line with `scenario_id`, `scenario_text`,
//!   `dimensions`, `scenario_scores` and `actions` (`id`, `text`, `scores`).
//! * preferences: one JSON object mapping subject id to raw preferences.
//! * responses: JSONL, one `{subject_id, scenario_id, ranking}` per line,
//!   `ranking` listing action ids best first.
//!
//! Loaders collect every problem they find. Each [`FileViolation`] carries the
//! file, the 1-based line when known, and a field path.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{
    validate_case, ActionRecord, CaseRecord, DecisionCase, DimensionSet, PreferenceVector,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileViolation {
    pub file: String,
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for FileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}: {}", self.file, line, self.field, self.message),
            None => write!(f, "{}: {}: {}", self.file, self.field, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {file}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} violation(s):\n{}", .0.len(), .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<FileViolation>),
}

impl DatasetError {
    pub fn violations(&self) -> &[FileViolation] {
        match self {
            DatasetError::Invalid(v) => v,
            DatasetError::Io { .. } => &[],
        }
    }
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        file: path.display().to_string(),
        source,
    })
}

struct Collector<'a> {
    file: &'a str,
    line: Option<usize>,
    found: Vec<FileViolation>,
}

impl<'a> Collector<'a> {
    fn new(file: &'a str) -> Self {
        Self {
            file,
            line: None,
            found: Vec::new(),
        }
    }

    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.found.push(FileViolation {
            file: self.file.to_string(),
            line: self.line,
            field: field.into(),
            message: message.into(),
        });
    }

    fn string(&mut self, obj: &Map<String, Value>, key: &str, path: &str) -> Option<String> {
        match obj.get(key) {
            None => {
                self.push(path, "missing required field");
                None
            }
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.push(path, "expected a string");
                None
            }
        }
    }

    /// Ids may be written as strings or integers.
    fn id(&mut self, value: Option<&Value>, path: &str) -> Option<String> {
        match value {
            None => {
                self.push(path, "missing required field");
                None
            }
            Some(Value::String(s)) if !s.is_empty() => Some(s.clone()),
            Some(Value::Number(n)) if n.is_u64() || n.is_i64() => Some(n.to_string()),
            Some(_) => {
                self.push(path, "expected a non-empty string or integer id");
                None
            }
        }
    }

    fn array<'v>(&mut self, obj: &'v Map<String, Value>, key: &str, path: &str) -> Option<&'v Vec<Value>> {
        match obj.get(key) {
            None => {
                self.push(path, "missing required field");
                None
            }
            Some(Value::Array(a)) => Some(a),
            Some(_) => {
                self.push(path, "expected an array");
                None
            }
        }
    }

    fn numbers(&mut self, values: &[Value], path: &str) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(values.len());
        let mut ok = true;
        for (j, v) in values.iter().enumerate() {
            match v.as_f64() {
                Some(x) => out.push(x),
                None => {
                    self.push(format!("{path}[{j}]"), format!("expected a number, got {v}"));
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }
}

fn parse_json_line<'a>(c: &mut Collector<'a>, text: &str) -> Option<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(obj)) => Some(obj),
        Ok(_) => {
            c.push("$", "record must be a JSON object");
            None
        }
        Err(e) => {
            c.push("$", format!("malformed JSON: {e}"));
            None
        }
    }
}

fn parse_case_record(c: &mut Collector<'_>, obj: &Map<String, Value>) -> Option<CaseRecord> {
    let before = c.found.len();
    let scenario_id = c.id(obj.get("scenario_id"), "scenario_id");
    let scenario_text = c.string(obj, "scenario_text", "scenario_text");
    let dimensions = c.array(obj, "dimensions", "dimensions").and_then(|a| {
        let labels: Option<Vec<String>> = a.iter().map(|v| v.as_str().map(str::to_string)).collect();
        if labels.is_none() {
            c.push("dimensions", "expected an array of strings");
        }
        labels
    });
    let scenario_scores = c
        .array(obj, "scenario_scores", "scenario_scores")
        .and_then(|a| c.numbers(a, "scenario_scores"));
    let mut actions = Vec::new();
    if let Some(list) = c.array(obj, "actions", "actions") {
        for (i, item) in list.iter().enumerate() {
            let path = format!("actions[{i}]");
            let Value::Object(a) = item else {
                c.push(path, "expected an object");
                continue;
            };
            let id = c.id(a.get("id"), &format!("{path}.id"));
            let text = c.string(a, "text", &format!("{path}.text"));
            let scores = c
                .array(a, "scores", &format!("{path}.scores"))
                .and_then(|s| c.numbers(s, &format!("{path}.scores")));
            if let (Some(id), Some(text), Some(scores)) = (id, text, scores) {
                actions.push(ActionRecord { id, text, scores });
            }
        }
    }
    if c.found.len() > before {
        return None;
    }
    Some(CaseRecord {
        scenario_id: scenario_id?,
        scenario_text: scenario_text?,
        dimensions: dimensions?,
        scenario_scores: scenario_scores?,
        actions,
    })
}

/// Result of scanning a case file.
#[derive(Debug, Clone, Default)]
pub struct CaseSet {
    /// Taken from the first line that declares valid dimensions; `None` for an empty file.
    pub dimensions: Option<DimensionSet>,
    pub cases: Vec<DecisionCase>,
    pub warnings: Vec<String>,
}

/// Parses case JSONL, returning every valid case alongside every violation.
pub fn scan_cases(text: &str, file: &str) -> (CaseSet, Vec<FileViolation>) {
    let mut c = Collector::new(file);
    let mut set = CaseSet::default();
    let mut seen_scenarios: HashMap<String, usize> = HashMap::new();

    for (index, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        c.line = Some(index + 1);
        let Some(obj) = parse_json_line(&mut c, raw) else { continue };
        let Some(record) = parse_case_record(&mut c, &obj) else { continue };

        if set.dimensions.is_none() {
            match DimensionSet::new(record.dimensions.clone()) {
                Ok(dims) => set.dimensions = Some(dims),
                Err(e) => {
                    c.push("dimensions", e.to_string());
                    continue;
                }
            }
        }
        let dims = set.dimensions.as_ref().expect("set above");
        let report = validate_case(&record, dims);
        if !report.is_ok() {
            for v in report.violations {
                let message = if v.field == "dimensions" {
                    format!("dimension inconsistency across lines: {}", v.message)
                } else {
                    v.message
                };
                c.push(v.field, message);
            }
            continue;
        }
        if let Some(first) = seen_scenarios.insert(record.scenario_id.clone(), index + 1) {
            c.push(
                "scenario_id",
                format!("duplicate scenario_id {:?} (first on line {first})", record.scenario_id),
            );
            continue;
        }
        set.cases.push(DecisionCase::from_record(record, dims).expect("validated above"));
    }

    if set.cases.is_empty() && c.found.is_empty() {
        set.warnings.push(format!("{file}: no cases found"));
    }
    (set, c.found)
}

pub fn parse_cases(text: &str, file: &str) -> Result<CaseSet, DatasetError> {
    let (set, violations) = scan_cases(text, file);
    if violations.is_empty() {
        Ok(set)
    } else {
        Err(DatasetError::Invalid(violations))
    }
}

/// Loads and validates a case file. An empty file yields no cases and a warning.
pub fn load_cases(path: impl AsRef<Path>) -> Result<CaseSet, DatasetError> {
    let path = path.as_ref();
    parse_cases(&read(path)?, &path.display().to_string())
}

/// Serializes cases as JSONL in the on-disk layout.
pub fn write_cases(cases: &[DecisionCase]) -> String {
    cases
        .iter()
        .map(|c| serde_json::to_string(&c.to_record()).expect("case records always serialize") + "\n")
        .collect()
}

/// Subject id to validated preference vector, in subject id order.
pub type Preferences = BTreeMap<String, PreferenceVector>;

/// 1-based line on which `"key"` first appears, for locating errors in a
/// single JSON document.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let needle = serde_json::to_string(key).ok()?;
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

pub fn parse_preferences(text: &str, file: &str, dims: &DimensionSet) -> Result<Preferences, DatasetError> {
    let mut c = Collector::new(file);
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            c.line = Some(e.line());
            c.push("$", format!("malformed JSON: {e}"));
            return Err(DatasetError::Invalid(c.found));
        }
    };
    let Value::Object(map) = root else {
        c.push("$", "expected an object mapping subject_id to preferences");
        return Err(DatasetError::Invalid(c.found));
    };
    let mut out = Preferences::new();
    for (subject, value) in &map {
        c.line = line_of_key(text, subject);
        let path = subject.clone();
        let Value::Array(items) = value else {
            c.push(path, "expected an array of numbers");
            continue;
        };
        let Some(raw) = c.numbers(items, &path) else { continue };
        if raw.len() != dims.len() {
            c.push(
                path,
                format!("length mismatch: {} preferences for {} dimensions", raw.len(), dims.len()),
            );
            continue;
        }
        let mut bad = false;
        for (j, &p) in raw.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                c.push(format!("{path}[{j}]"), format!("preference {p} out of [0,1]"));
                bad = true;
            }
        }
        if !bad {
            out.insert(subject.clone(), PreferenceVector::new(raw, dims).expect("checked above"));
        }
    }
    if c.found.is_empty() {
        Ok(out)
    } else {
        Err(DatasetError::Invalid(c.found))
    }
}

pub fn load_preferences(path: impl AsRef<Path>, dims: &DimensionSet) -> Result<Preferences, DatasetError> {
    let path = path.as_ref();
    parse_preferences(&read(path)?, &path.display().to_string(), dims)
}

pub fn write_preferences(prefs: &Preferences) -> String {
    let map: BTreeMap<&str, &[f64]> = prefs.iter().map(|(k, v)| (k.as_str(), v.raw())).collect();
    serde_json::to_string_pretty(&map).expect("preferences always serialize") + "\n"
}

/// One subject's ranking of one scenario's actions, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Response {
    pub subject_id: String,
    pub scenario_id: String,
    pub ranking: Vec<String>,
}

/// Parses responses and checks each ranking against the referenced case.
pub fn parse_responses(text: &str, file: &str, cases: &[DecisionCase]) -> Result<Vec<Response>, DatasetError> {
    let by_id: HashMap<&str, &DecisionCase> = cases.iter().map(|c| (c.scenario_id(), c)).collect();
    let mut c = Collector::new(file);
    let mut out = Vec::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();

    for (index, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        c.line = Some(index + 1);
        let Some(obj) = parse_json_line(&mut c, raw) else { continue };
        let before = c.found.len();
        let subject_id = c.id(obj.get("subject_id"), "subject_id");
        let scenario_id = c.id(obj.get("scenario_id"), "scenario_id");
        let ranking: Option<Vec<String>> = c.array(&obj, "ranking", "ranking").map(|items| {
            items
                .iter()
                .enumerate()
                .filter_map(|(k, v)| c.id(Some(v), &format!("ranking[{k}]")))
                .collect()
        });
        if c.found.len() > before {
            continue;
        }
        let (Some(subject_id), Some(scenario_id), Some(ranking)) = (subject_id, scenario_id, ranking) else {
            continue;
        };
        let Some(case) = by_id.get(scenario_id.as_str()) else {
            c.push("scenario_id", format!("unknown scenario_id {scenario_id:?}"));
            continue;
        };
        let expected: HashSet<&str> = case.action_ids().collect();
        let given: HashSet<&str> = ranking.iter().map(String::as_str).collect();
        if given.len() != ranking.len() || given != expected {
            let mut missing: Vec<&str> = expected.difference(&given).copied().collect();
            let mut extra: Vec<&str> = given.difference(&expected).copied().collect();
            missing.sort_unstable();
            extra.sort_unstable();
            c.push(
                "ranking",
                format!(
                    "not a permutation of scenario {scenario_id:?} action ids (missing {missing:?}, unknown {extra:?}, {} duplicate(s))",
                    ranking.len() - given.len()
                ),
            );
            continue;
        }
        if let Some(first) = seen.insert((subject_id.clone(), scenario_id.clone()), index + 1) {
            c.push(
                "scenario_id",
                format!("subject {subject_id:?} already answered scenario {scenario_id:?} on line {first}"),
            );
            continue;
        }
        out.push(Response {
            subject_id,
            scenario_id,
            ranking,
        });
    }
    if c.found.is_empty() {
        Ok(out)
    } else {
        Err(DatasetError::Invalid(c.found))
    }
}

pub fn load_responses(path: impl AsRef<Path>, cases: &[DecisionCase]) -> Result<Vec<Response>, DatasetError> {
    let path = path.as_ref();
    parse_responses(&read(path)?, &path.display().to_string(), cases)
}

pub fn write_responses(responses: &[Response]) -> String {
    responses
        .iter()
        .map(|r| serde_json::to_string(r).expect("responses always serialize") + "\n")
        .collect()
}

/// A numeric table with a header row, as used for predicted and gold
/// per-dimension scores (one row per sample, one column per dimension).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_score_table(text: &str, file: &str) -> Result<ScoreTable, DatasetError> {
    let mut c = Collector::new(file);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let columns: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(e) => {
            c.line = Some(1);
            c.push("header", e.to_string());
            return Err(DatasetError::Invalid(c.found));
        }
    };
    if columns.is_empty() || columns.iter().all(String::is_empty) {
        c.line = Some(1);
        c.push("header", "missing header row");
        return Err(DatasetError::Invalid(c.found));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                c.line = e.position().map(|p| p.line() as usize);
                c.push("row", e.to_string());
                continue;
            }
        };
        c.line = record.position().map(|p| p.line() as usize);
        let mut row = Vec::with_capacity(record.len());
        for (k, cell) in record.iter().enumerate() {
            let name = columns.get(k).map_or("?", String::as_str);
            match cell.parse::<f64>() {
                Ok(x) if x.is_finite() => row.push(x),
                _ => c.push(
                    format!("column {} ({name})", k + 1),
                    format!("expected a number, got {cell:?}"),
                ),
            }
        }
        rows.push(row);
    }
    if c.found.is_empty() {
        Ok(ScoreTable { columns, rows })
    } else {
        Err(DatasetError::Invalid(c.found))
    }
}

pub fn load_score_table(path: impl AsRef<Path>) -> Result<ScoreTable, DatasetError> {
    let path = path.as_ref();
    parse_score_table(&read(path)?, &path.display().to_string())
}
