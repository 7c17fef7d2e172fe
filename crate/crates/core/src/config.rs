//! Engine configuration: calibration, coefficients, tracker and detector
//! parameters, opposite starting positions, and filter mode.
//!
//! ```toml
//! filter_mode = "plus"
//!
//! [calibration]          # image pixels, y down
//! lnx = 240
//! rnx = 1040
//! uny = 360
//! lny = 560
//! frame_width = 1280
//! frame_height = 720
//!
//! [coefficients]
//! q = 1.2
//!
//! [tracker]
//! association_radius = 60
//!
//! [[initial_positions]]  # one entry per set
//! pos_a = 2
//! pos_b = 4
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::DetectorConfig;
use crate::error::{Error, Result};
use crate::geometry::{NetCalibration, TacticCoefficients};
use crate::rotation::RotationState;
use crate::track::{FilterMode, TrackerConfig};

/// Net calibration as entered by an operator, in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub lnx: f64,
    pub rnx: f64,
    pub uny: f64,
    pub lny: f64,
    #[serde(default = "default_width")]
    pub frame_width: f64,
    #[serde(default = "default_height")]
    pub frame_height: f64,
}

fn default_width() -> f64 {
    crate::detect::REFERENCE_WIDTH
}

fn default_height() -> f64 {
    crate::detect::REFERENCE_HEIGHT
}

impl CalibrationConfig {
    pub fn to_court_view(&self) -> Result<NetCalibration> {
        if self.rnx > self.frame_width || self.lny > self.frame_height || self.uny < 0.0 {
            return Err(Error::InvalidCalibration(
                "net coordinates fall outside the frame".into(),
            ));
        }
        NetCalibration::from_image(self.lnx, self.rnx, self.uny, self.lny, self.frame_height)
    }

    /// Inverse of [`CalibrationConfig::to_court_view`].
    pub fn from_court_view(cal: &NetCalibration, frame_width: f64) -> Self {
        Self {
            lnx: cal.lnx,
            rnx: cal.rnx,
            uny: cal.frame_height - cal.uny,
            lny: cal.frame_height - cal.lny,
            frame_width,
            frame_height: cal.frame_height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialPositions {
    pub pos_a: u8,
    pub pos_b: u8,
}

impl InitialPositions {
    pub fn state(&self) -> Result<RotationState> {
        RotationState::new(self.pos_a, self.pos_b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub calibration: CalibrationConfig,
    #[serde(default)]
    pub coefficients: TacticCoefficients,
    /// Defaults scale with frame width when absent.
    #[serde(default)]
    pub tracker: Option<TrackerConfig>,
    /// Defaults scale with frame size when absent.
    #[serde(default)]
    pub detector: Option<DetectorConfig>,
    #[serde(default)]
    pub initial_positions: Vec<InitialPositions>,
    #[serde(default, alias = "mode")]
    pub filter_mode: FilterMode,
}

impl EngineConfig {
    pub fn new(calibration: CalibrationConfig) -> Self {
        Self {
            calibration,
            coefficients: TacticCoefficients::default(),
            tracker: None,
            detector: None,
            initial_positions: Vec::new(),
            filter_mode: FilterMode::default(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: EngineConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.net_calibration()?;
        self.coefficients.validate()?;
        self.tracker_config().validate()?;
        self.detector_config().validate()?;
        for p in &self.initial_positions {
            p.state()?;
        }
        Ok(())
    }

    pub fn net_calibration(&self) -> Result<NetCalibration> {
        self.calibration.to_court_view()
    }

    pub fn tracker_config(&self) -> TrackerConfig {
        self.tracker
            .unwrap_or_else(|| TrackerConfig::for_frame_width(self.calibration.frame_width))
    }

    pub fn detector_config(&self) -> DetectorConfig {
        self.detector.unwrap_or_else(|| {
            DetectorConfig::for_frame(
                self.calibration.frame_width as usize,
                self.calibration.frame_height as usize,
            )
        })
    }

    /// Starting positions for the `set_index`-th set (0-based).
    pub fn positions_for_set(&self, set_index: usize) -> Result<RotationState> {
        self.initial_positions
            .get(set_index)
            .ok_or_else(|| {
                Error::Config(format!(
                    "no initial_positions entry for set {} ({} configured)",
                    set_index + 1,
                    self.initial_positions.len()
                ))
            })?
            .state()
    }
}
