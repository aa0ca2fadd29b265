use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use valuerank::dataset::{
    parse_preferences, parse_responses, parse_score_table, scan_cases, DatasetError, FileViolation, Preferences,
};
use valuerank::harness::{accuracy_report, evaluate as run_evaluation, EvaluationReport, PipelineConfig};
use valuerank::metrics::ScorePrediction;
use valuerank::variants::RankTrace;
use valuerank::{rank_variant, DimensionSet, Method, RankingResult, ScoringConfig, Variant};

use crate::inputs::{apply_assessor, load, read_input, to_json, write_outputs, RunManifest};
use crate::{AccuracyArgs, CompareArgs, EvaluateArgs, RankArgs, ScoringArgs, ValidateArgs};

fn scoring_config(args: &ScoringArgs) -> Result<ScoringConfig> {
    Ok(ScoringConfig::new(args.w, args.sigmoid_scale)?)
}

/// Left-aligned columns separated by two spaces.
fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut text = String::new();
        for (cell, w) in cells.zip(&widths) {
            let _ = write!(text, "{cell:<w$}  ");
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn pick_subject(prefs: &Preferences, requested: Option<&str>) -> Result<String> {
    match requested {
        Some(id) if prefs.contains_key(id) => Ok(id.to_string()),
        Some(id) => bail!("subject {id:?} has no entry in the preference file"),
        None if prefs.len() == 1 => Ok(prefs.keys().next().cloned().unwrap_or_default()),
        None => bail!(
            "--subject is required when the preference file holds {} subjects",
            prefs.len()
        ),
    }
}

#[derive(Serialize)]
struct CaseRanking {
    scenario_id: String,
    #[serde(flatten)]
    result: RankingResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    explain: Option<RankTrace>,
}

#[derive(Serialize)]
struct RankReport {
    subject: String,
    method: Method,
    variant: Variant,
    w: f64,
    sigmoid_scale: f64,
    cases: Vec<CaseRanking>,
}

fn rank_table(report: &RankReport) -> String {
    let key = if report.method == Method::Promethee { "net_flow" } else { "score" };
    let mut out = String::new();
    for case in &report.cases {
        let r = &case.result;
        let rows: Vec<Vec<String>> = r
            .order
            .iter()
            .enumerate()
            .map(|(pos, id)| {
                let i = r.action_ids.iter().position(|a| a == id).unwrap_or(0);
                vec![(pos + 1).to_string(), id.clone(), f6(r.flows[i])]
            })
            .collect();
        let _ = writeln!(out, "case {}", case.scenario_id);
        out.push_str(&render_table(&["rank", "action", key], &rows));
        out.push('\n');
    }
    out
}

pub fn rank(args: RankArgs) -> Result<ExitCode> {
    let config = scoring_config(&args.scoring)?;
    let loaded = load(&args.cases, &args.preferences, None)?;
    let subject = pick_subject(&loaded.preferences, args.subject.as_deref())?;
    let prefs = &loaded.preferences[&subject];
    let cases = apply_assessor(loaded.cases, &args.assessor)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .context("starting worker pool")?;
    let outcomes = pool.install(|| {
        cases
            .par_iter()
            .map(|case| {
                rank_variant(args.variant, args.method, case, prefs, &config)
                    .with_context(|| format!("ranking case {}", case.scenario_id()))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let report = RankReport {
        subject: subject.clone(),
        method: args.method,
        variant: args.variant,
        w: config.w(),
        sigmoid_scale: config.sigmoid_scale(),
        cases: cases
            .iter()
            .zip(outcomes)
            .map(|(case, outcome)| CaseRanking {
                scenario_id: case.scenario_id().to_string(),
                result: outcome.result,
                explain: args.explain.then_some(outcome.trace),
            })
            .collect(),
    };
    let json = to_json(&report)?;
    match &args.out {
        None => print!("{json}"),
        Some(dir) => {
            let mut manifest = RunManifest::new("rank", loaded.digests).scoring(&args.scoring);
            manifest.method = Some(args.method);
            manifest.variant = Some(args.variant);
            manifest.subject = Some(subject);
            manifest.explain = Some(args.explain);
            manifest.assessor_url = args.assessor.assessor_url.clone();
            write_outputs(dir, &[("rankings.json", json)], manifest)?;
            print!("{}", rank_table(&report));
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Per-pair rows followed by summary rows whose `subject_id` names the
/// statistic and whose `case_id` is empty.
fn evaluation_csv(report: &EvaluationReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["subject_id", "case_id", "os_sim", "first_match", "kendall"])?;
    for r in &report.records {
        w.write_record([
            r.subject_id.clone(),
            r.case_id.clone(),
            r.os_sim.to_string(),
            u8::from(r.first_match).to_string(),
            r.kendall.map(|k| k.to_string()).unwrap_or_default(),
        ])?;
    }
    let summary = [
        ("summary:mean_of_means", report.os_sim_mean_of_means, report.first_acc_mean_of_means),
        ("summary:mean_of_means_sd", report.os_sim_subject_sd, report.first_acc_subject_sd),
        ("summary:pooled", report.os_sim_pooled, report.first_acc),
    ];
    for (label, os, first) in summary {
        w.write_record([label.to_string(), String::new(), os.to_string(), first.to_string(), String::new()])?;
    }
    w.write_record([
        "summary:pooled_sd".to_string(),
        String::new(),
        report.os_sim_pooled_sd.to_string(),
        String::new(),
        String::new(),
    ])?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn subjects_csv(report: &EvaluationReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["subject_id", "cases", "mean_os_sim", "first_acc"])?;
    for s in &report.subjects {
        w.write_record([
            s.subject_id.clone(),
            s.cases.to_string(),
            s.mean_os_sim.to_string(),
            s.first_acc.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn summary_table(report: &EvaluationReport) -> String {
    let rows = vec![
        vec!["pairs".into(), report.records.len().to_string(), String::new()],
        vec!["subjects".into(), report.subjects.len().to_string(), String::new()],
        vec!["os_sim (mean of subject means)".into(), f6(report.os_sim_mean_of_means), f6(report.os_sim_subject_sd)],
        vec!["os_sim (pooled)".into(), f6(report.os_sim_pooled), f6(report.os_sim_pooled_sd)],
        vec!["first_acc (pooled)".into(), f6(report.first_acc), String::new()],
        vec!["first_acc (mean of subject means)".into(), f6(report.first_acc_mean_of_means), f6(report.first_acc_subject_sd)],
    ];
    render_table(&["metric", "value", "sd"], &rows)
}

pub fn evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    let scoring = scoring_config(&args.scoring)?;
    let loaded = load(&args.cases, &args.preferences, Some(&args.responses))?;
    let cases = apply_assessor(loaded.cases, &args.assessor)?;
    let config = PipelineConfig {
        method: args.method,
        variant: args.variant,
        scoring,
    };
    let report = run_evaluation(&cases, &loaded.preferences, &loaded.responses, &config)?;
    print!("{}", summary_table(&report));
    if let Some(dir) = &args.out {
        let mut manifest = RunManifest::new("evaluate", loaded.digests).scoring(&args.scoring);
        manifest.method = Some(args.method);
        manifest.variant = Some(args.variant);
        manifest.assessor_url = args.assessor.assessor_url.clone();
        let files = [
            ("evaluation.json", to_json(&report)?),
            ("evaluation.csv", evaluation_csv(&report)?),
            ("subjects.csv", subjects_csv(&report)?),
        ];
        write_outputs(dir, &files, manifest)?;
    }
    Ok(ExitCode::SUCCESS)
}

const COMPARISON_HEADER: [&str; 6] = ["method", "os_sim", "os_sim_sd", "os_sim_pooled", "first_acc", "pairs"];

fn comparison_rows(reports: &[EvaluationReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                f6(r.os_sim_mean_of_means),
                f6(r.os_sim_subject_sd),
                f6(r.os_sim_pooled),
                f6(r.first_acc),
                r.records.len().to_string(),
            ]
        })
        .collect()
}

pub fn compare_mcdm(args: CompareArgs) -> Result<ExitCode> {
    let scoring = scoring_config(&args.scoring)?;
    let loaded = load(&args.cases, &args.preferences, Some(&args.responses))?;
    if loaded.responses.is_empty() {
        bail!("{}: no responses to compare against", args.responses.display());
    }
    let cases = apply_assessor(loaded.cases, &args.assessor)?;
    let reports = Method::ALL
        .into_iter()
        .map(|method| {
            let config = PipelineConfig {
                method,
                variant: args.variant,
                scoring,
            };
            run_evaluation(&cases, &loaded.preferences, &loaded.responses, &config)
                .with_context(|| format!("evaluating {method}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = comparison_rows(&reports);
    print!("{}", render_table(&COMPARISON_HEADER, &rows));
    if let Some(dir) = &args.out {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COMPARISON_HEADER)?;
        for r in &reports {
            w.write_record([
                r.method.to_string(),
                r.os_sim_mean_of_means.to_string(),
                r.os_sim_subject_sd.to_string(),
                r.os_sim_pooled.to_string(),
                r.first_acc.to_string(),
                r.records.len().to_string(),
            ])?;
        }
        let csv_text = String::from_utf8(w.into_inner()?)?;
        let mut manifest = RunManifest::new("compare-mcdm", loaded.digests).scoring(&args.scoring);
        manifest.variant = Some(args.variant);
        manifest.assessor_url = args.assessor.assessor_url.clone();
        write_outputs(dir, &[("comparison.json", to_json(&reports)?), ("comparison.csv", csv_text)], manifest)?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn assess_accuracy(args: AccuracyArgs) -> Result<ExitCode> {
    let (text, pred_digest) = read_input("predicted", &args.predicted)?;
    let predicted = parse_score_table(&text, &pred_digest.path)?;
    let (text, gold_digest) = read_input("gold", &args.gold)?;
    let gold = parse_score_table(&text, &gold_digest.path)?;
    if predicted.columns != gold.columns {
        bail!(
            "column mismatch: {} has [{}], {} has [{}]",
            pred_digest.path,
            predicted.columns.join(", "),
            gold_digest.path,
            gold.columns.join(", ")
        );
    }
    let scores = ScorePrediction::new(predicted.rows, gold.rows)?;
    let report = accuracy_report(&scores, &args.thresholds)?;

    let mut header: Vec<String> = vec!["samples".into(), "dimensions".into()];
    let mut row = vec![report.samples.to_string(), report.dimensions.to_string()];
    for t in &report.accuracy {
        header.push(format!("AvgAcc t={} (%)", t.threshold));
        row.push(f6(t.avg_acc * 100.0));
    }
    header.push("MAE".into());
    row.push(f6(report.mae));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    print!("{}", render_table(&header, &[row]));

    if let Some(dir) = &args.out {
        let mut manifest = RunManifest::new("assess-accuracy", vec![pred_digest, gold_digest]);
        manifest.thresholds = Some(args.thresholds.clone());
        write_outputs(dir, &[("accuracy.json", to_json(&report)?)], manifest)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn absorb<T>(found: &mut Vec<FileViolation>, result: Result<T, DatasetError>) -> Result<Option<T>> {
    match result {
        Ok(value) => Ok(Some(value)),
        Err(DatasetError::Invalid(v)) => {
            found.extend(v);
            Ok(None)
        }
        Err(err) => Err(err.into()),
    }
}

pub fn validate(args: ValidateArgs) -> Result<ExitCode> {
    let mut found = Vec::new();
    let (text, digest) = read_input("cases", &args.cases)?;
    let (set, violations) = scan_cases(&text, &digest.path);
    found.extend(violations);
    for warning in &set.warnings {
        eprintln!("warning: {warning}");
    }
    let dims = set.dimensions.clone().unwrap_or_else(DimensionSet::default_six);

    let prefs = match &args.preferences {
        Some(path) => {
            let (text, digest) = read_input("preferences", path)?;
            absorb(&mut found, parse_preferences(&text, &digest.path, &dims))?
        }
        None => None,
    };
    if let Some(path) = &args.responses {
        let (text, digest) = read_input("responses", path)?;
        let responses = absorb(&mut found, parse_responses(&text, &digest.path, &set.cases))?;
        if let (Some(prefs), Some(responses)) = (&prefs, responses) {
            let missing: BTreeSet<&str> = responses
                .iter()
                .map(|r| r.subject_id.as_str())
                .filter(|s| !prefs.contains_key(*s))
                .collect();
            for subject in missing {
                found.push(FileViolation {
                    file: digest.path.clone(),
                    line: None,
                    field: "subject_id".into(),
                    message: format!("subject {subject:?} has responses but no preferences"),
                });
            }
        }
    }

    for v in &found {
        println!("{v}");
    }
    match found.len() {
        1 => println!("1 violation"),
        n => println!("{n} violations"),
    }
    Ok(if found.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
