//! Tactic templates and motion settings.
//!
//! Template files describe x positions as fractions of the net span
//! measured from `lnx`, and heights as court-view y in multiples of the net
//! width, so one file fits any calibration. [`TemplateSpec::resolve`] turns
//! a spec into pixel ranges for a concrete calibration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::TacticLabel;
use crate::error::{Error, Result};
use crate::geometry::NetCalibration;

/// Template as written in a template file, calibration independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub label: TacticLabel,
    /// Setter x, as a fraction of the net span from `lnx`.
    pub start_x: [f64; 2],
    /// Hitter x, as a fraction of the net span from `lnx`.
    pub end_x: [f64; 2],
    /// Apex y in multiples of the net width.
    pub apex_height: [f64; 2],
    /// Setter contact y in multiples of the net width.
    pub start_height: [f64; 2],
    /// Frames from setter contact to hitter contact.
    pub duration: [u32; 2],
}

/// Template resolved against a calibration. x ranges are court-view pixels
/// on the team-B side; team-A rounds are mirrored at generation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TacticTemplate {
    pub label: TacticLabel,
    pub start_x_range: [f64; 2],
    pub end_x_range: [f64; 2],
    pub apex_height_range: [f64; 2],
    pub start_height_range: [f64; 2],
    pub duration_range: [u32; 2],
}

fn check_range(name: &str, label: TacticLabel, r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
        return Err(Error::InvalidParameter(format!("{label}: bad {name} range {r:?}")));
    }
    Ok(())
}

impl TemplateSpec {
    pub fn validate(&self) -> Result<()> {
        check_range("start_x", self.label, self.start_x)?;
        check_range("end_x", self.label, self.end_x)?;
        check_range("apex_height", self.label, self.apex_height)?;
        check_range("start_height", self.label, self.start_height)?;
        if self.duration[0] < 3 || self.duration[0] > self.duration[1] {
            return Err(Error::InvalidParameter(format!(
                "{}: bad duration range {:?}",
                self.label, self.duration
            )));
        }
        if self.label == TacticLabel::Unknown {
            return Err(Error::InvalidParameter("no template may be labelled unknown".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, cal: &NetCalibration) -> TacticTemplate {
        let x = |f: f64| cal.lnx + f * cal.span();
        TacticTemplate {
            label: self.label,
            start_x_range: [x(self.start_x[0]), x(self.start_x[1])],
            end_x_range: [x(self.end_x[0]), x(self.end_x[1])],
            apex_height_range: self.apex_height,
            start_height_range: self.start_height,
            duration_range: self.duration,
        }
    }
}

/// Timing and ball appearance shared by every generated round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionConfig {
    pub fps: f64,
    /// Pixels per frame squared. Derived from the net width when absent.
    pub gravity: Option<f64>,
    /// Ball-free frames before the pass.
    pub lead_in_frames: u32,
    pub pass_frames: [u32; 2],
    /// Frames between the end of the pass and the set with no ball
    /// detection (the ball is in the setter's hands).
    pub contact_gap_frames: u32,
    pub ball_area: f64,
    pub ball_circularity: f64,
    pub ball_score: f64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            fps: 24.0,
            gravity: None,
            lead_in_frames: 8,
            pass_frames: [6, 8],
            contact_gap_frames: 5,
            ball_area: 80.0,
            ball_circularity: 0.9,
            ball_score: 0.9,
        }
    }
}

impl MotionConfig {
    /// A ball falling two net widths from rest takes 0.9 s.
    pub fn gravity(&self, cal: &NetCalibration) -> f64 {
        self.gravity.unwrap_or_else(|| {
            let t = 0.9 * self.fps;
            4.0 * cal.net_width() / (t * t)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fps > 0.0) {
            return Err(Error::InvalidParameter("fps must be positive".into()));
        }
        if let Some(g) = self.gravity {
            if !(g > 0.0) {
                return Err(Error::InvalidParameter("gravity must be positive".into()));
            }
        }
        if self.pass_frames[0] < 2 || self.pass_frames[0] > self.pass_frames[1] {
            return Err(Error::InvalidParameter(format!(
                "bad pass_frames {:?}",
                self.pass_frames
            )));
        }
        Ok(())
    }
}

/// Motion settings plus one template per tactic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateSet {
    #[serde(default)]
    pub motion: MotionConfig,
    #[serde(rename = "template")]
    pub templates: Vec<TemplateSpec>,
}

impl Default for TemplateSet {
    fn default() -> Self {
        use TacticLabel::*;
        let t = |label, start_x, end_x, apex_height, start_height, duration| TemplateSpec {
            label,
            start_x,
            end_x,
            apex_height,
            start_height,
            duration,
        };
        let opposite = |label| t(label, [0.46, 0.50], [0.02, 0.05], [1.8, 2.1], [0.9, 1.1], [22, 28]);
        Self {
            motion: MotionConfig::default(),
            templates: vec![
                t(Quick, [0.38, 0.42], [0.48, 0.52], [1.45, 1.55], [0.95, 1.1], [16, 20]),
                t(ThirtyOne, [0.08, 0.12], [0.74, 0.77], [1.7, 1.9], [0.9, 1.1], [18, 22]),
                t(BackOne, [0.40, 0.44], [0.28, 0.32], [1.45, 1.55], [0.95, 1.1], [16, 20]),
                t(Short, [0.30, 0.34], [0.70, 0.73], [1.25, 1.4], [0.9, 1.0], [18, 22]),
                t(Outside, [0.36, 0.42], [0.90, 0.95], [2.0, 2.3], [0.9, 1.1], [24, 30]),
                t(Bic, [0.40, 0.44], [0.54, 0.58], [0.72, 0.80], [0.5, 0.6], [14, 18]),
                opposite(DBall),
                opposite(Oppo),
            ],
        }
    }
}

impl TemplateSet {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let set: TemplateSet = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Exactly one template per concrete tactic.
    pub fn validate(&self) -> Result<()> {
        self.motion.validate()?;
        for t in &self.templates {
            t.validate()?;
        }
        for label in TacticLabel::TACTICS {
            let n = self.templates.iter().filter(|t| t.label == label).count();
            if n != 1 {
                return Err(Error::InvalidParameter(format!(
                    "expected one {label} template, found {n}"
                )));
            }
        }
        if self.templates.len() != TacticLabel::TACTICS.len() {
            return Err(Error::InvalidParameter("expected exactly eight templates".into()));
        }
        Ok(())
    }

    pub fn get(&self, label: TacticLabel) -> Option<&TemplateSpec> {
        self.templates.iter().find(|t| t.label == label)
    }
}
