use super::{CandidateRegion, Frame};

/// Ball-likeness of a candidate region in `[0, 1]`.
///
/// The tracker only reads the resulting score, so a learned classifier can
/// be dropped in here without touching anything downstream.
pub trait CandidateScorer: Send + Sync {
    fn score(&self, region: &CandidateRegion, frame: &Frame) -> f64;
}

/// `circularity * area_band(area)`. The band factor is 1 on
/// `[min_area, max_area]` and falls linearly to 0 at `0.5 * min_area` and
/// `2 * max_area`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricScorer {
    pub min_area: f64,
    pub max_area: f64,
}

impl GeometricScorer {
    pub fn new(min_area: f64, max_area: f64) -> Self {
        Self { min_area, max_area }
    }

    pub fn area_factor(&self, area: f64) -> f64 {
        let lo = 0.5 * self.min_area;
        let hi = 2.0 * self.max_area;
        if area >= self.min_area && area <= self.max_area {
            1.0
        } else if area < self.min_area {
            ((area - lo) / (self.min_area - lo)).clamp(0.0, 1.0)
        } else {
            ((hi - area) / (hi - self.max_area)).clamp(0.0, 1.0)
        }
    }
}

impl CandidateScorer for GeometricScorer {
    fn score(&self, region: &CandidateRegion, _frame: &Frame) -> f64 {
        (region.circularity * self.area_factor(region.area)).clamp(0.0, 1.0)
    }
}
