//! Input loading with content hashes, and the manifest written next to every
//! set of outputs.

use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use valuerank::assessor::{rescore_all, RemoteProvider};
use valuerank::dataset::{parse_cases, parse_preferences, parse_responses, DatasetError, Preferences, Response};
use valuerank::{DecisionCase, DimensionSet, Method, Variant};

use crate::{AssessorArgs, ScoringArgs};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a whole input file and records its hash.
pub fn read_input(role: &'static str, path: &Path) -> Result<(String, FileDigest)> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        file: display.clone(),
        source,
    })?;
    let digest = FileDigest {
        role,
        sha256: sha256_hex(text.as_bytes()),
        path: display,
    };
    Ok((text, digest))
}

pub struct Loaded {
    pub cases: Vec<DecisionCase>,
    pub preferences: Preferences,
    pub responses: Vec<Response>,
    pub digests: Vec<FileDigest>,
}

/// Loads cases, preferences and (optionally) responses, cross-validated.
pub fn load(cases: &Path, preferences: &Path, responses: Option<&Path>) -> Result<Loaded> {
    let mut digests = Vec::new();
    let (text, digest) = read_input("cases", cases)?;
    let set = parse_cases(&text, &digest.path)?;
    for warning in &set.warnings {
        eprintln!("warning: {warning}");
    }
    digests.push(digest);
    let dimensions = set.dimensions.unwrap_or_else(DimensionSet::default_six);

    let (text, digest) = read_input("preferences", preferences)?;
    let prefs = parse_preferences(&text, &digest.path, &dimensions)?;
    digests.push(digest);

    let responses = match responses {
        Some(path) => {
            let (text, digest) = read_input("responses", path)?;
            let parsed = parse_responses(&text, &digest.path, &set.cases)?;
            digests.push(digest);
            parsed
        }
        None => Vec::new(),
    };
    Ok(Loaded {
        cases: set.cases,
        preferences: prefs,
        responses,
        digests,
    })
}

/// Replaces the file's objective scores with remote ones when an assessor is configured.
pub fn apply_assessor(cases: Vec<DecisionCase>, args: &AssessorArgs) -> Result<Vec<DecisionCase>> {
    let Some(url) = &args.assessor_url else {
        return Ok(cases);
    };
    let provider = RemoteProvider::new(url.clone(), Duration::from_secs_f64(args.assessor_timeout));
    let rescored = rescore_all(&provider, &cases, args.assessor_in_flight)
        .with_context(|| format!("remote assessor at {url}"))?;
    Ok(rescored)
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run. Contains no timestamps or
/// machine-specific values, so identical runs produce identical manifests.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigmoid_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assessor_url: Option<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &'static str, inputs: Vec<FileDigest>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            method: None,
            variant: None,
            w: None,
            sigmoid_scale: None,
            subject: None,
            thresholds: None,
            explain: None,
            assessor_url: None,
            inputs,
            outputs: Vec::new(),
        }
    }

    pub fn scoring(mut self, args: &ScoringArgs) -> Self {
        self.w = Some(args.w);
        self.sigmoid_scale = Some(args.sigmoid_scale);
        self
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes `files` into `dir` and then `manifest.json` listing their hashes.
pub fn write_outputs(dir: &Path, files: &[(&str, String)], mut manifest: RunManifest) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, content) in files {
        if *name == "manifest.json" {
            bail!("output name collides with the manifest");
        }
        let path = dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        manifest.outputs.push(OutputDigest {
            file: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
        });
    }
    let path = dir.join("manifest.json");
    fs::write(&path, to_json(&manifest)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
