//! Sources of objective scores.
//!
//! The engine ranks from per-dimension objective scores. They can come from
//! annotations stored with the cases ([`GoldFileProvider`]) or from a scoring
//! service reached over HTTP ([`RemoteProvider`]). Whatever the source, the
//! scores are checked for length and range before use.
//!
//! HTTP contract: `POST <url>` with body
//! `{"scenario": str, "actions": [str], "dimensions": [str]}`, answered by
//! `{"scenario_scores": [num], "action_scores": [[num]]}`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DecisionCase, DimensionSet, ObjectiveScores};

/// Environment variable naming the default scoring endpoint.
pub const ASSESSOR_URL_ENV: &str = "VALUERANK_ASSESSOR_URL";
pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
const RETRY_BACKOFF: Duration = Duration::from_secs(1);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssessorError {
    #[error("scenario {0:?} is not in the loaded set")]
    UnknownScenario(String),
    #[error("request to {url} failed after {attempts} attempt(s): {message}")]
    Transport {
        url: String,
        attempts: usize,
        message: String,
    },
    #[error("{url} answered HTTP {status}: {body}")]
    Status { url: String, status: u16, body: String },
    #[error("invalid response body: {0}")]
    InvalidResponse(String),
    #[error("{what}: expected {expected} entries, got {got}")]
    Shape {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("{what}: score {value} at dimension index {index} is outside [-1, 1]")]
    Range { what: String, index: usize, value: f64 },
}

/// Scores for one scenario and its actions, in action order.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub scenario_scores: ObjectiveScores,
    pub action_scores: Vec<ObjectiveScores>,
}

/// What a provider is asked to score.
#[derive(Debug, Clone, Copy)]
pub struct AssessRequest<'a> {
    pub scenario_id: &'a str,
    pub scenario_text: &'a str,
    pub action_texts: &'a [String],
    pub dimensions: &'a DimensionSet,
}

impl<'a> AssessRequest<'a> {
    pub fn for_case(case: &'a DecisionCase, action_texts: &'a [String]) -> Self {
        Self {
            scenario_id: case.scenario_id(),
            scenario_text: case.scenario_text(),
            action_texts,
            dimensions: case.dimensions(),
        }
    }
}

pub trait Assessor: Send + Sync {
    fn assess(&self, request: &AssessRequest<'_>) -> Result<Assessment, AssessorError>;
}

/// Serves the scores stored with a set of cases.
#[derive(Debug, Clone, Default)]
pub struct GoldFileProvider {
    by_scenario: HashMap<String, Assessment>,
}

impl GoldFileProvider {
    pub fn new(cases: &[DecisionCase]) -> Self {
        let by_scenario = cases
            .iter()
            .map(|c| {
                (
                    c.scenario_id().to_string(),
                    Assessment {
                        scenario_scores: c.scenario_scores().clone(),
                        action_scores: c.actions().iter().map(|a| a.scores.clone()).collect(),
                    },
                )
            })
            .collect();
        Self { by_scenario }
    }
}

impl Assessor for GoldFileProvider {
    fn assess(&self, request: &AssessRequest<'_>) -> Result<Assessment, AssessorError> {
        self.by_scenario
            .get(request.scenario_id)
            .cloned()
            .ok_or_else(|| AssessorError::UnknownScenario(request.scenario_id.to_string()))
    }
}

#[derive(Debug, Serialize)]
struct WireRequest<'a> {
    scenario: &'a str,
    actions: &'a [String],
    dimensions: &'a [String],
}

#[derive(Debug, Deserialize)]
struct WireResponse {
    scenario_scores: Vec<f64>,
    action_scores: Vec<Vec<f64>>,
}

fn checked_scores(values: Vec<f64>, dims: &DimensionSet, what: String) -> Result<ObjectiveScores, AssessorError> {
    if values.len() != dims.len() {
        return Err(AssessorError::Shape {
            what,
            expected: dims.len(),
            got: values.len(),
        });
    }
    if let Some((index, &value)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || !(-1.0..=1.0).contains(*v))
    {
        return Err(AssessorError::Range { what, index, value });
    }
    Ok(ObjectiveScores::new(values, dims).expect("checked above"))
}

/// Validates a decoded response body against the request.
pub fn decode_response(body: &str, request: &AssessRequest<'_>) -> Result<Assessment, AssessorError> {
    let wire: WireResponse =
        serde_json::from_str(body).map_err(|e| AssessorError::InvalidResponse(e.to_string()))?;
    if wire.action_scores.len() != request.action_texts.len() {
        return Err(AssessorError::Shape {
            what: "action_scores".into(),
            expected: request.action_texts.len(),
            got: wire.action_scores.len(),
        });
    }
    let scenario_scores = checked_scores(wire.scenario_scores, request.dimensions, "scenario_scores".into())?;
    let action_scores = wire
        .action_scores
        .into_iter()
        .enumerate()
        .map(|(i, row)| checked_scores(row, request.dimensions, format!("action_scores[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(Assessment {
        scenario_scores,
        action_scores,
    })
}

/// HTTP client for a scoring service. Transport failures and 5xx answers are
/// retried once after a fixed backoff.
#[derive(Debug, Clone)]
pub struct RemoteProvider {
    url: String,
    agent: ureq::Agent,
    backoff: Duration,
}

impl RemoteProvider {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            url: url.into(),
            agent,
            backoff: RETRY_BACKOFF,
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    fn attempt(&self, body: &str) -> Result<(u16, String), String> {
        let mut response = self
            .agent
            .post(&self.url)
            .header("content-type", "application/json")
            .send(body)
            .map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok((status, text))
    }
}

impl Assessor for RemoteProvider {
    fn assess(&self, request: &AssessRequest<'_>) -> Result<Assessment, AssessorError> {
        let body = serde_json::to_string(&WireRequest {
            scenario: request.scenario_text,
            actions: request.action_texts,
            dimensions: request.dimensions.names(),
        })
        .expect("request always serializes");

        let mut attempts = 0;
        let (status, text) = loop {
            attempts += 1;
            match self.attempt(&body) {
                Ok((status, _)) if status >= 500 && attempts < 2 => {}
                Ok(answer) => break answer,
                Err(message) if attempts >= 2 => {
                    return Err(AssessorError::Transport {
                        url: self.url.clone(),
                        attempts,
                        message,
                    })
                }
                Err(_) => {}
            }
            thread::sleep(self.backoff);
        };
        if !(200..300).contains(&status) {
            return Err(AssessorError::Status {
                url: self.url.clone(),
                status,
                body: text.chars().take(200).collect(),
            });
        }
        decode_response(&text, request)
    }
}

/// Replaces a case's scores with an assessor's output.
pub fn rescore_case(assessor: &dyn Assessor, case: &DecisionCase) -> Result<DecisionCase, AssessorError> {
    let texts: Vec<String> = case.actions().iter().map(|a| a.text.clone()).collect();
    let request = AssessRequest::for_case(case, &texts);
    let assessment = assessor.assess(&request)?;
    if assessment.action_scores.len() != case.len() {
        return Err(AssessorError::Shape {
            what: "action_scores".into(),
            expected: case.len(),
            got: assessment.action_scores.len(),
        });
    }
    let shape = |e: crate::error::ModelError| AssessorError::InvalidResponse(e.to_string());
    case.with_scenario_scores(assessment.scenario_scores)
        .and_then(|c| c.with_action_scores(assessment.action_scores))
        .map_err(shape)
}

/// Rescoring of many cases with at most `max_in_flight` concurrent calls.
/// Output follows input order; any failure fails the whole batch.
pub fn rescore_all(
    assessor: &dyn Assessor,
    cases: &[DecisionCase],
    max_in_flight: usize,
) -> Result<Vec<DecisionCase>, AssessorError> {
    let workers = max_in_flight.max(1).min(cases.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<DecisionCase, AssessorError>>>> = Mutex::new(vec![None; cases.len()]);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cases.len() {
                    break;
                }
                let result = rescore_case(assessor, &cases[i]);
                let failed = result.is_err();
                slots.lock().expect("no poisoning")[i] = Some(result);
                if failed {
                    // stop handing out work; already-started calls finish
                    next.store(cases.len(), Ordering::Relaxed);
                }
            });
        }
    });
    let slots = slots.into_inner().expect("no poisoning");
    if let Some(err) = slots.iter().flatten().find_map(|r| r.as_ref().err()) {
        return Err(err.clone());
    }
    Ok(slots.into_iter().flatten().map(|r| r.expect("no errors")).collect())
}

#[cfg(test)]
impl RemoteProvider {
    fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionRecord, CaseRecord};

    fn dims() -> DimensionSet {
        DimensionSet::new(["a", "b"]).unwrap()
    }

    fn case(id: &str) -> DecisionCase {
        let record = CaseRecord {
            scenario_id: id.into(),
            scenario_text: format!("scenario {id}"),
            dimensions: vec!["a".into(), "b".into()],
            scenario_scores: vec![0.2, -0.4],
            actions: vec![
                ActionRecord { id: "x".into(), text: "do x".into(), scores: vec![0.1, 0.9] },
                ActionRecord { id: "y".into(), text: "do y".into(), scores: vec![-1.0, 1.0] },
            ],
        };
        DecisionCase::from_record(record, &dims()).unwrap()
    }

    #[test]
    fn gold_provider_is_identity() {
        let c = case("s1");
        let gold = GoldFileProvider::new(std::slice::from_ref(&c));
        let once = rescore_case(&gold, &c).unwrap();
        let twice = rescore_case(&gold, &c).unwrap();
        assert_eq!(once, c);
        assert_eq!(once, twice);
        assert_eq!(
            rescore_case(&gold, &case("other")),
            Err(AssessorError::UnknownScenario("other".into()))
        );
    }

    #[test]
    fn response_validation() {
        let d = dims();
        let texts = vec!["x".to_string()];
        let req = AssessRequest { scenario_id: "s", scenario_text: "t", action_texts: &texts, dimensions: &d };
        let ok = decode_response(r#"{"scenario_scores":[0,0],"action_scores":[[0,0]]}"#, &req).unwrap();
        assert_eq!(ok.action_scores[0].values(), &[0.0, 0.0]);

        let short = decode_response(r#"{"scenario_scores":[0],"action_scores":[[0,0]]}"#, &req);
        assert!(matches!(short, Err(AssessorError::Shape { expected: 2, got: 1, .. })));

        let high = decode_response(r#"{"scenario_scores":[0,0],"action_scores":[[0,2.0]]}"#, &req);
        assert!(matches!(high, Err(AssessorError::Range { index: 1, value, .. }) if value == 2.0));

        let rows = decode_response(r#"{"scenario_scores":[0,0],"action_scores":[]}"#, &req);
        assert!(matches!(rows, Err(AssessorError::Shape { .. })));
        assert!(matches!(decode_response("nope", &req), Err(AssessorError::InvalidResponse(_))));
    }

    #[test]
    fn unreachable_endpoint_is_retried_then_fails() {
        // bind then drop to get a port nothing listens on
        let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let provider = RemoteProvider::new(format!("http://127.0.0.1:{port}/assess"), Duration::from_secs(2))
            .with_backoff(Duration::from_millis(10));
        let err = rescore_case(&provider, &case("s1")).unwrap_err();
        assert!(matches!(err, AssessorError::Transport { attempts: 2, .. }), "{err}");
    }

    struct Flaky;
    impl Assessor for Flaky {
        fn assess(&self, r: &AssessRequest<'_>) -> Result<Assessment, AssessorError> {
            if r.scenario_id == "bad" {
                return Err(AssessorError::UnknownScenario("bad".into()));
            }
            Ok(Assessment {
                scenario_scores: ObjectiveScores::zeros(r.dimensions),
                action_scores: vec![ObjectiveScores::zeros(r.dimensions); r.action_texts.len()],
            })
        }
    }

    #[test]
    fn batch_is_all_or_nothing_and_ordered() {
        let cases: Vec<_> = (0..9).map(|i| case(&format!("s{i}"))).collect();
        let out = rescore_all(&Flaky, &cases, 4).unwrap();
        let ids: Vec<_> = out.iter().map(|c| c.scenario_id().to_string()).collect();
        assert_eq!(ids, (0..9).map(|i| format!("s{i}")).collect::<Vec<_>>());
        assert!(out.iter().all(|c| c.scenario_scores().values() == [0.0, 0.0]));

        let mut with_bad = cases.clone();
        with_bad.insert(3, case("bad"));
        assert!(rescore_all(&Flaky, &with_bad, 4).is_err());
    }
}
