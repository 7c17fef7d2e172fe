//! Blob tracking and trajectory harvesting.

mod filter;

pub use filter::{
    evaluate_status, evaluate_x_decrease, evaluate_x_increase, plus_filter_valid, update_status_baseline, BlobStatus,
    FilterMode, DEFAULT_STILL_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::detect::{DetectionRecord, REFERENCE_WIDTH};
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Shortest path that can count as a setting trajectory.
pub const MIN_SET_LENGTH: usize = 9;

/// A tracked moving-object hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub id: u64,
    pub pts: Vec<Point2>,
    pub status: BlobStatus,
    pub first_frame: u64,
    pub last_update_frame: u64,
}

impl Blob {
    fn spawn(id: u64, at: Point2, frame: u64) -> Self {
        Self {
            id,
            pts: vec![at],
            status: BlobStatus::Still,
            first_frame: frame,
            last_update_frame: frame,
        }
    }

    pub fn predict_next(&self) -> Result<Point2> {
        predict_next(&self.pts)
    }
}

/// Constant-velocity extrapolation one frame past the newest point: a
/// least-squares line through the last `min(3, n)` points against their
/// frame offset.
pub fn predict_next(pts: &[Point2]) -> Result<Point2> {
    predict_ahead(pts, 1.0)
}

/// Same fit as [`predict_next`], evaluated `steps` frames ahead.
pub fn predict_ahead(pts: &[Point2], steps: f64) -> Result<Point2> {
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let tail = &pts[pts.len() - pts.len().min(3)..];
    let n = tail.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let (mx, my) = tail.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x / n, sy + p.y / n));
    let (mut sxx, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (i, p) in tail.iter().enumerate() {
        let dt = i as f64 - t_mean;
        sxx += dt * dt;
        sx += dt * (p.x - mx);
        sy += dt * (p.y - my);
    }
    let t = n - 1.0 + steps - t_mean;
    Ok(Point2::new(mx + sx / sxx * t, my + sy / sxx * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    pub still_threshold: f64,
    pub association_radius: f64,
    pub max_coast_frames: u64,
    /// Minimum candidate score for starting a new blob.
    pub spawn_score_floor: f64,
    pub min_set_length: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            still_threshold: DEFAULT_STILL_THRESHOLD,
            association_radius: 60.0,
            max_coast_frames: 3,
            spawn_score_floor: 0.3,
            min_set_length: MIN_SET_LENGTH,
        }
    }
}

impl TrackerConfig {
    /// Defaults with the association radius scaled to the frame width.
    pub fn for_frame_width(width: f64) -> Self {
        let base = Self::default();
        Self {
            association_radius: base.association_radius * width / REFERENCE_WIDTH,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.still_threshold > 0.0) {
            return Err(Error::InvalidParameter("still_threshold must be positive".into()));
        }
        if !(self.association_radius > 0.0) {
            return Err(Error::InvalidParameter("association_radius must be positive".into()));
        }
        if self.min_set_length < 3 {
            return Err(Error::InvalidParameter("min_set_length must be at least 3".into()));
        }
        Ok(())
    }
}

/// An ordered run of court-view positions from one blob.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Point2>,
    pub source_blob_id: Option<u64>,
    pub valid: bool,
}

impl Trajectory {
    pub fn from_blob(b: &Blob) -> Self {
        Self {
            points: b.pts.clone(),
            source_blob_id: Some(b.id),
            valid: true,
        }
    }

    pub fn from_points(points: Vec<Point2>) -> Self {
        Self {
            points,
            source_blob_id: None,
            valid: true,
        }
    }

    /// Placeholder for "no setting trajectory": a single `(0, 0)` point
    /// flagged invalid.
    pub fn sentinel() -> Self {
        Self {
            points: vec![Point2::ORIGIN],
            source_blob_id: None,
            valid: false,
        }
    }

    pub fn is_sentinel(&self) -> bool {
        !self.valid
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Single-owner tracker state for one round clip.
#[derive(Debug, Clone)]
pub struct TrackerState {
    pub config: TrackerConfig,
    pub mode: FilterMode,
    active: Vec<Blob>,
    finished: Vec<Blob>,
    next_id: u64,
    last_frame: Option<u64>,
}

impl TrackerState {
    pub fn new(config: TrackerConfig, mode: FilterMode) -> Self {
        Self {
            config,
            mode,
            active: Vec::new(),
            finished: Vec::new(),
            next_id: 0,
            last_frame: None,
        }
    }

    pub fn active(&self) -> &[Blob] {
        &self.active
    }

    pub fn finished(&self) -> &[Blob] {
        &self.finished
    }

    /// Every blob ever created, oldest first.
    pub fn all_blobs(&self) -> Vec<&Blob> {
        let mut all: Vec<&Blob> = self.finished.iter().chain(self.active.iter()).collect();
        all.sort_by_key(|b| b.id);
        all
    }

    fn retire(&mut self, keep: impl Fn(&Blob) -> bool) {
        let (stay, go): (Vec<Blob>, Vec<Blob>) = std::mem::take(&mut self.active).into_iter().partition(keep);
        self.active = stay;
        self.finished.extend(go);
    }

    /// Fold one frame's detections into the tracker.
    ///
    /// Blobs and candidates are paired greedily, closest predicted position
    /// first, each used at most once and only within the association
    /// radius. Matched blobs grow and re-evaluate their status; leftover
    /// candidates scoring at least the spawn floor start new blobs; blobs
    /// that have missed more than `max_coast_frames` frames are retired but
    /// kept for harvesting.
    pub fn associate(&mut self, record: &DetectionRecord) -> Result<()> {
        let frame = record.frame_index;
        if let Some(prev) = self.last_frame {
            if frame <= prev {
                return Err(Error::OutOfOrder {
                    previous: prev,
                    got: frame,
                });
            }
        }
        self.last_frame = Some(frame);

        let max_coast = self.config.max_coast_frames;
        // Frames already missed before this one.
        self.retire(|b| frame - b.last_update_frame - 1 <= max_coast);

        let radius = self.config.association_radius;
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (bi, blob) in self.active.iter().enumerate() {
            let steps = (frame - blob.last_update_frame) as f64;
            let predicted = predict_ahead(&blob.pts, steps).unwrap_or(*blob.pts.last().expect("non-empty"));
            for (ci, c) in record.candidates.iter().enumerate() {
                let d = predicted.distance(&c.position);
                if d <= radius {
                    pairs.push((d, bi, ci));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut blob_used = vec![false; self.active.len()];
        let mut cand_used = vec![false; record.candidates.len()];
        for (_, bi, ci) in pairs {
            if blob_used[bi] || cand_used[ci] {
                continue;
            }
            blob_used[bi] = true;
            cand_used[ci] = true;
            let blob = &mut self.active[bi];
            blob.pts.push(record.candidates[ci].position);
            blob.last_update_frame = frame;
            blob.status = evaluate_status(&blob.pts, self.mode, self.config.still_threshold);
        }

        for (ci, c) in record.candidates.iter().enumerate() {
            if !cand_used[ci] && c.score >= self.config.spawn_score_floor {
                self.active.push(Blob::spawn(self.next_id, c.position, frame));
                self.next_id += 1;
            }
        }

        self.retire(|b| frame - b.last_update_frame <= max_coast);
        Ok(())
    }

    /// Paths of every blob whose status is directed-moving under the
    /// tracker's rule, in blob creation order.
    pub fn harvest_trajectories(&self) -> Vec<Trajectory> {
        self.all_blobs()
            .into_iter()
            .filter(|b| b.status == BlobStatus::DirectedMoving)
            .map(Trajectory::from_blob)
            .collect()
    }
}

/// Run a full round through a fresh tracker and harvest.
pub fn track_round(records: &[DetectionRecord], config: TrackerConfig, mode: FilterMode) -> Result<Vec<Trajectory>> {
    let mut state = TrackerState::new(config, mode);
    for r in records {
        state.associate(r)?;
    }
    Ok(state.harvest_trajectories())
}

/// The last trajectory (chronologically) with at least `min_len` points,
/// or the sentinel when there is none.
pub fn extract_setting_trajectory(trajectories: &[Trajectory], min_len: usize) -> Trajectory {
    trajectories
        .iter()
        .rev()
        .find(|t| t.valid && t.len() >= min_len)
        .cloned()
        .unwrap_or_else(Trajectory::sentinel)
}
