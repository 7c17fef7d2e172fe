//! Directory of per-round detection streams to a report.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use setpath_core::config::EngineConfig;
use setpath_core::detect::stream::read_detections;
use setpath_core::rotation::{parse_round_key, RoundKey};
use setpath_core::track::FilterMode;

use crate::session::{PipelineError, Result, RoundResult, RoundSubmission, SessionStore, TacticDistribution};

/// Files that may sit next to round streams and are not rounds.
const SIDECARS: [&str; 2] = ["manifest.json", "config.toml"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchFailure {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub mode: FilterMode,
    pub rounds: Vec<BatchRound>,
    pub stats: TacticDistribution,
    pub warnings: Vec<String>,
    pub failures: Vec<BatchFailure>,
}

impl BatchReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRound {
    pub file: String,
    #[serde(flatten)]
    pub result: RoundResult,
}

/// Process every `score_round_team.*` file in `input_dir` as one set, in
/// key order. Files whose names do not parse are skipped with a warning;
/// rounds that fail are recorded and the rest still run.
pub fn process_batch(input_dir: &Path, config: &EngineConfig, mode: FilterMode) -> Result<BatchReport> {
    let mut warnings = Vec::new();
    let mut keyed: Vec<(RoundKey, String)> = Vec::new();
    for entry in std::fs::read_dir(input_dir)? {
        let entry = entry?;
        if !entry.file_type()?.is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || SIDECARS.contains(&name.as_str()) {
            continue;
        }
        let stem = name.split('.').next().unwrap_or_default();
        match parse_round_key(stem) {
            Ok(key) => keyed.push((key, name)),
            Err(e) => {
                tracing::warn!("skipping {name}: {e}");
                warnings.push(format!("skipping {name}: {e}"));
            }
        }
    }
    keyed.sort_by(|a, b| (a.0.score, a.0.round, &a.1).cmp(&(b.0.score, b.0.round, &b.1)));

    let mut cfg = config.clone();
    cfg.filter_mode = mode;
    let store = SessionStore::in_memory();
    let session = store.create_session(Some("batch".into()), cfg)?;
    let frame_height = config.calibration.frame_height;

    let mut rounds = Vec::new();
    let mut failures = Vec::new();
    for (key, name) in keyed {
        let outcome = File::open(input_dir.join(&name))
            .map_err(PipelineError::from)
            .and_then(|f| Ok(read_detections(BufReader::new(f), frame_height)?))
            .and_then(|records| {
                session.submit(RoundSubmission {
                    key,
                    receiving: None,
                    records,
                })
            });
        match outcome {
            Ok(result) => rounds.push(BatchRound { file: name, result }),
            Err(e) => {
                tracing::error!("{name}: {e}");
                failures.push(BatchFailure {
                    file: name,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(BatchReport {
        mode,
        stats: session.stats(),
        rounds,
        warnings,
        failures,
    })
}
