//! One round through the whole chain: tracking, harvesting, setting
//! extraction, features, classification.

use serde::{Deserialize, Serialize};

use crate::classify::{classify, compute_features, Prediction, SetContext, TrajectoryFeatures};
use crate::config::EngineConfig;
use crate::detect::DetectionRecord;
use crate::error::Result;
use crate::geometry::{CourtSections, NetCalibration, TacticCoefficients};
use crate::track::{extract_setting_trajectory, track_round, FilterMode, TrackerConfig, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAnalysis {
    pub prediction: Prediction,
    pub features: Option<TrajectoryFeatures>,
    pub setting_trajectory: Trajectory,
    /// Trajectories that survived the validity filter.
    pub harvested: usize,
}

/// Validated, immutable analysis settings. Cheap to clone and share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Engine {
    pub calibration: NetCalibration,
    pub sections: CourtSections,
    pub coefficients: TacticCoefficients,
    pub tracker: TrackerConfig,
    pub mode: FilterMode,
}

impl Engine {
    pub fn new(
        calibration: NetCalibration,
        coefficients: TacticCoefficients,
        tracker: TrackerConfig,
        mode: FilterMode,
    ) -> Result<Self> {
        calibration.validate()?;
        coefficients.validate()?;
        tracker.validate()?;
        Ok(Self {
            sections: calibration.sections()?,
            calibration,
            coefficients,
            tracker,
            mode,
        })
    }

    pub fn from_config(cfg: &EngineConfig) -> Result<Self> {
        Self::new(
            cfg.net_calibration()?,
            cfg.coefficients,
            cfg.tracker_config(),
            cfg.filter_mode,
        )
    }

    pub fn with_mode(mut self, mode: FilterMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn analyze(&self, records: &[DetectionRecord], ctx: &SetContext) -> Result<RoundAnalysis> {
        let harvested = track_round(records, self.tracker, self.mode)?;
        let setting = extract_setting_trajectory(&harvested, self.tracker.min_set_length);
        if setting.is_sentinel() {
            return Ok(RoundAnalysis {
                prediction: Prediction::NoSet,
                features: None,
                setting_trajectory: setting,
                harvested: harvested.len(),
            });
        }
        let f = compute_features(&setting, &self.calibration)?;
        let label = classify(&f, &self.sections, &self.coefficients, ctx, &self.calibration);
        Ok(RoundAnalysis {
            prediction: Prediction::Tactic(label),
            features: Some(f),
            setting_trajectory: setting,
            harvested: harvested.len(),
        })
    }
}
