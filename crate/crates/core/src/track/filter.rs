//! Trajectory validity rules.
//!
//! The baseline rule looks only at the newest three points of a blob. The
//! majority-trend rule looks at every consecutive x step, so a few
//! direction-flipped false positives at the tail of an otherwise clean
//! path do not invalidate it.

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;

/// Default distance below which the newest step counts as standing still.
pub const DEFAULT_STILL_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlobStatus {
    Still,
    DirectedMoving,
}

/// Which validity rule a tracker runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    /// Last-three-points direction check.
    Baseline,
    /// Majority x-trend check over the whole path.
    #[default]
    Plus,
}

impl std::str::FromStr for FilterMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(FilterMode::Baseline),
            "plus" => Ok(FilterMode::Plus),
            other => Err(format!("unknown filter mode {other:?} (expected baseline|plus)")),
        }
    }
}

impl std::fmt::Display for FilterMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FilterMode::Baseline => "baseline",
            FilterMode::Plus => "plus",
        })
    }
}

/// Direction check on the newest three points.
///
/// Still when the newest step is shorter than `still_threshold`; directed
/// when both the x steps and the y steps of the last two moves keep their
/// sign; still otherwise. Fewer than three points is still.
pub fn update_status_baseline(pts: &[Point2], still_threshold: f64) -> BlobStatus {
    let n = pts.len();
    if n < 3 {
        return BlobStatus::Still;
    }
    let (p, p1, p2) = (pts[n - 1], pts[n - 2], pts[n - 3]);
    if p.distance(&p1) < still_threshold {
        return BlobStatus::Still;
    }
    let (dx1, dx2) = (p.x - p1.x, p1.x - p2.x);
    let (dy1, dy2) = (p.y - p1.y, p1.y - p2.y);
    if dx1 * dx2 > 0.0 && dy1 * dy2 > 0.0 {
        BlobStatus::DirectedMoving
    } else {
        BlobStatus::Still
    }
}

/// Counts of strictly negative and strictly positive consecutive x steps.
fn x_step_signs(pts: &[Point2]) -> (usize, usize) {
    pts.windows(2).fold((0, 0), |(neg, pos), w| {
        let dx = w[1].x - w[0].x;
        if dx < 0.0 {
            (neg + 1, pos)
        } else if dx > 0.0 {
            (neg, pos + 1)
        } else {
            (neg, pos)
        }
    })
}

/// True when strictly more than half of the x steps are negative.
pub fn evaluate_x_decrease(pts: &[Point2]) -> bool {
    if pts.len() < 2 {
        return false;
    }
    let (neg, _) = x_step_signs(pts);
    2 * neg > pts.len() - 1
}

/// True when strictly more than half of the x steps are positive.
pub fn evaluate_x_increase(pts: &[Point2]) -> bool {
    if pts.len() < 2 {
        return false;
    }
    let (_, pos) = x_step_signs(pts);
    2 * pos > pts.len() - 1
}

pub fn plus_filter_valid(pts: &[Point2]) -> bool {
    evaluate_x_decrease(pts) || evaluate_x_increase(pts)
}

/// Status of a point history under the given rule.
pub fn evaluate_status(pts: &[Point2], mode: FilterMode, still_threshold: f64) -> BlobStatus {
    match mode {
        FilterMode::Baseline => update_status_baseline(pts, still_threshold),
        FilterMode::Plus => {
            if plus_filter_valid(pts) {
                BlobStatus::DirectedMoving
            } else {
                BlobStatus::Still
            }
        }
    }
}
