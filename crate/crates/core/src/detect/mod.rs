//! Classical ball-candidate detection.
//!
//! Per frame: Gaussian blur, running-average background subtraction,
//! opening/closing, 8-connected contour extraction, then scoring through a
//! replaceable [`CandidateScorer`]. The output is a [`DetectionRecord`] per
//! frame, the same unit an external detector hands in through the
//! detection-stream file format (see [`stream`]).

mod background;
mod blur;
mod contours;
mod morphology;
mod scorer;
pub mod stream;

pub use background::{background_subtract, BackgroundModel};
pub use blur::{gaussian_blur, gaussian_kernel_1d};
pub use contours::{find_contours, BBox, CandidateRegion};
pub use morphology::{close, dilate, erode, morph_clean, open};
pub use scorer::{CandidateScorer, GeometricScorer};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{to_court_view, Point2};

/// A decoded grayscale frame. Intensities are kept as `f32` in `[0, 255]`
/// so that filtering does not quantize.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f32>,
    pub index: u64,
    pub timestamp: f64,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>, index: u64, timestamp: f64) -> Result<Self> {
        if width * height != pixels.len() {
            return Err(Error::InvalidParameter(format!(
                "{}x{} frame needs {} pixels, got {}",
                width,
                height,
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            index,
            timestamp,
        })
    }

    pub fn from_gray8(width: usize, height: usize, data: &[u8], index: u64, timestamp: f64) -> Result<Self> {
        Self::new(
            width,
            height,
            data.iter().map(|&v| v as f32).collect(),
            index,
            timestamp,
        )
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
            index: 0,
            timestamp: 0.0,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    pub fn total_intensity(&self) -> f64 {
        self.pixels.iter().map(|&v| v as f64).sum()
    }
}

/// Binary foreground mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }
}

/// A ball candidate as the tracker sees it, in court-view coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub position: Point2,
    pub area: f64,
    pub circularity: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame_index: u64,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub sigma: f64,
    pub learning_rate: f32,
    pub threshold: f32,
    pub open_radius: usize,
    pub close_radius: usize,
    pub min_area: f64,
    pub max_area: f64,
    pub max_candidates: usize,
}

/// Reference frame size the default parameters were chosen for.
pub const REFERENCE_WIDTH: f64 = 1280.0;
pub const REFERENCE_HEIGHT: f64 = 720.0;

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            learning_rate: 0.05,
            threshold: 25.0,
            open_radius: 1,
            close_radius: 1,
            min_area: 40.0,
            max_area: 1200.0,
            max_candidates: 12,
        }
    }
}

impl DetectorConfig {
    /// Defaults rescaled for a frame of the given size: blur width follows
    /// frame width, the area band follows frame area.
    pub fn for_frame(width: usize, height: usize) -> Self {
        let base = Self::default();
        let wscale = width as f64 / REFERENCE_WIDTH;
        let ascale = (width * height) as f64 / (REFERENCE_WIDTH * REFERENCE_HEIGHT);
        Self {
            sigma: base.sigma * wscale,
            min_area: base.min_area * ascale,
            max_area: base.max_area * ascale,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if !(self.min_area > 0.0 && self.min_area <= self.max_area) {
            return Err(Error::InvalidParameter("area band must satisfy 0 < min <= max".into()));
        }
        Ok(())
    }
}

/// Stateful per-clip detector. The background model makes it strictly
/// sequential: feed frames in order, one detector per clip.
pub struct Detector {
    config: DetectorConfig,
    scorer: Box<dyn CandidateScorer>,
    model: Option<BackgroundModel>,
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        config.validate()?;
        let scorer = GeometricScorer::new(config.min_area, config.max_area);
        Ok(Self::with_scorer(config, Box::new(scorer)))
    }

    pub fn with_scorer(config: DetectorConfig, scorer: Box<dyn CandidateScorer>) -> Self {
        Self {
            config,
            scorer,
            model: None,
        }
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    /// Candidate regions for one frame, in image coordinates, best score
    /// first and capped at `max_candidates`.
    pub fn regions(&mut self, frame: &Frame) -> Result<Vec<CandidateRegion>> {
        let smooth = gaussian_blur(frame, self.config.sigma)?;
        let mask = match self.model.take() {
            None => {
                self.model = Some(BackgroundModel::from_frame(
                    &smooth,
                    self.config.learning_rate,
                    self.config.threshold,
                ));
                Mask::empty(frame.width, frame.height)
            }
            Some(model) => {
                let (mask, next) = background_subtract(&smooth, model)?;
                self.model = Some(next);
                mask
            }
        };
        let cleaned = morph_clean(&mask, self.config.open_radius, self.config.close_radius);
        let mut regions = find_contours(&cleaned);
        for r in regions.iter_mut() {
            r.score = self.scorer.score(r, frame);
        }
        // Stable sort keeps raster order among equal scores.
        regions.sort_by(|a, b| b.score.total_cmp(&a.score));
        regions.truncate(self.config.max_candidates);
        Ok(regions)
    }

    /// Run the full chain on one frame and return the record in court-view
    /// coordinates.
    pub fn process(&mut self, frame: &Frame) -> Result<DetectionRecord> {
        let regions = self.regions(frame)?;
        let h = frame.height as f64;
        Ok(DetectionRecord {
            frame_index: frame.index,
            candidates: regions
                .iter()
                .map(|r| Candidate {
                    position: to_court_view(r.centroid, h),
                    area: r.area,
                    circularity: r.circularity,
                    score: r.score,
                })
                .collect(),
        })
    }
}
