//! Accuracy over labelled rounds: correct detections over total detections,
//! overall and per true tactic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LabeledRound;
use crate::analyze::Engine;
use crate::classify::{Prediction, TacticLabel};
use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::rotation::RoundKey;
use crate::track::FilterMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionEntry {
    pub index: usize,
    pub round_key: RoundKey,
    pub truth: TacticLabel,
    pub predicted: Prediction,
}

impl PredictionEntry {
    pub fn correct(&self) -> bool {
        self.predicted == Prediction::Tactic(self.truth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TacticAccuracy {
    pub total: usize,
    pub correct: usize,
    pub no_set: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub mode: FilterMode,
    pub total: usize,
    pub correct: usize,
    pub no_set: usize,
    pub accuracy: f64,
    pub per_tactic: BTreeMap<TacticLabel, TacticAccuracy>,
    pub predictions: Vec<PredictionEntry>,
}

impl AccuracyReport {
    /// Tally a prediction log.
    pub fn from_predictions(mode: FilterMode, predictions: Vec<PredictionEntry>) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut per_tactic: BTreeMap<TacticLabel, TacticAccuracy> = BTreeMap::new();
        let (mut correct, mut no_set) = (0, 0);
        for p in &predictions {
            let cell = per_tactic.entry(p.truth).or_default();
            cell.total += 1;
            if p.correct() {
                cell.correct += 1;
                correct += 1;
            }
            if p.predicted == Prediction::NoSet {
                cell.no_set += 1;
                no_set += 1;
            }
        }
        for cell in per_tactic.values_mut() {
            cell.accuracy = cell.correct as f64 / cell.total as f64;
        }
        Ok(Self {
            mode,
            total: predictions.len(),
            correct,
            no_set,
            accuracy: correct as f64 / predictions.len() as f64,
            per_tactic,
            predictions,
        })
    }
}

/// Run every round through the pipeline in `mode` and score it.
pub fn evaluate(dataset: &[LabeledRound], mode: FilterMode, config: &EngineConfig) -> Result<AccuracyReport> {
    evaluate_with(dataset, &Engine::from_config(config)?.with_mode(mode))
}

pub fn evaluate_with(dataset: &[LabeledRound], engine: &Engine) -> Result<AccuracyReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predictions = dataset
        .iter()
        .enumerate()
        .map(|(index, r)| {
            Ok(PredictionEntry {
                index,
                round_key: r.round_key,
                truth: r.truth,
                predicted: engine.analyze(&r.records, &r.context())?.prediction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AccuracyReport::from_predictions(engine.mode, predictions)
}
