//! Synthetic rounds with known tactics.
//!
//! A round is a short pass into the setter, a few frames with the ball in
//! the setter's hands, then the set: x moves linearly from setter to hitter
//! while y follows a constant-gravity parabola through the template apex.
//! Noise adds Gaussian jitter, drops ball detections, scatters clutter
//! candidates, and appends reversed-direction false positives after the set.

mod dataset;
mod render;
mod report;
mod templates;

pub use dataset::{
    generate_benchmark, generate_match, load_dataset, write_dataset, Dataset, Manifest, ManifestRound, MANIFEST_FILE,
};
pub use render::FrameRenderer;
pub use report::{evaluate, evaluate_with, AccuracyReport, PredictionEntry, TacticAccuracy};
pub use templates::{MotionConfig, TacticTemplate, TemplateSet, TemplateSpec};

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analyze::Engine;
use crate::classify::{Prediction, SetContext, TacticLabel};
use crate::config::EngineConfig;
use crate::detect::{Candidate, DetectionRecord, REFERENCE_WIDTH};
use crate::error::{Error, Result};
use crate::geometry::{NetCalibration, Point2};
use crate::rotation::{RoundKey, Team};
use crate::track::FilterMode;

/// Coordinates are snapped to this grid so that image/court-view flips
/// are exact.
const QUANTUM: f64 = 1.0 / 256.0;

/// Tail false-positive step, in pixels for an 800 px net span.
const TAIL_STEP_X: f64 = 8.0;
const TAIL_STEP_Y: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    pub jitter_sigma: f64,
    pub dropout_rate: f64,
    pub clutter_rate: f64,
    pub tail_fp_count: u32,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            jitter_sigma: 0.0,
            dropout_rate: 0.0,
            clutter_rate: 0.0,
            tail_fp_count: 0,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(Error::InvalidParameter("jitter_sigma must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidParameter("dropout_rate must be in [0, 1]".into()));
        }
        if !(self.clutter_rate >= 0.0 && self.clutter_rate.is_finite()) {
            return Err(Error::InvalidParameter("clutter_rate must be >= 0".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let n: NoiseConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        n.validate()?;
        Ok(n)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRound {
    pub records: Vec<DetectionRecord>,
    pub truth: TacticLabel,
    pub round_key: RoundKey,
    /// Whether the possessing team's opposite is in the back row.
    pub truth_back_row: bool,
    /// Ball detections the round would have had without dropout.
    pub ball_frames: usize,
    pub dropped: usize,
}

impl LabeledRound {
    /// Classifier context built from the ground truth.
    pub fn context(&self) -> SetContext {
        let tr = self.round_key.possessing_team();
        match tr {
            Team::A => SetContext::new(tr, self.truth_back_row, false),
            Team::B => SetContext::new(tr, false, self.truth_back_row),
        }
    }
}

/// SplitMix64 finaliser, used to derive independent stream seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn quantize(v: f64) -> f64 {
    (v / QUANTUM).round() * QUANTUM
}

fn sample(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..=r[1])
    }
}

fn sample_u32(rng: &mut ChaCha8Rng, r: [u32; 2]) -> u32 {
    rng.random_range(r[0]..=r[1])
}

/// Noise-free ball path of one round in court-view, before mirroring.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalRound {
    pub pass: Vec<Point2>,
    pub set: Vec<Point2>,
}

/// Generator bound to a calibration, a frame width and motion settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulator {
    pub calibration: NetCalibration,
    pub frame_width: f64,
    pub motion: MotionConfig,
}

impl Simulator {
    pub fn new(calibration: NetCalibration, frame_width: f64, motion: MotionConfig) -> Self {
        Self {
            calibration,
            frame_width,
            motion,
        }
    }

    /// The template x and height draws, in that order, then the timing.
    fn nominal(&self, t: &TacticTemplate, rng: &mut ChaCha8Rng) -> Result<NominalRound> {
        let cal = &self.calibration;
        let nw = cal.net_width();
        let g = self.motion.gravity(cal);
        let sx = sample(rng, t.start_x_range);
        let ex = sample(rng, t.end_x_range);
        let apex = sample(rng, t.apex_height_range) * nw;
        let y0 = sample(rng, t.start_height_range) * nw;
        let duration = sample_u32(rng, t.duration_range) as usize;
        let pass_len = sample_u32(rng, self.motion.pass_frames) as usize;

        for (name, x) in [("start", sx), ("end", ex)] {
            if x < cal.lnx || x > cal.rnx {
                return Err(Error::InfeasibleGeometry(format!(
                    "{}: {name} x {x:.1} outside the net span [{}, {}]",
                    t.label, cal.lnx, cal.rnx
                )));
            }
        }
        if apex <= y0 {
            return Err(Error::InfeasibleGeometry(format!(
                "{}: apex not above the setter",
                t.label
            )));
        }
        let t_apex = (2.0 * (apex - y0) / g).sqrt();
        if t_apex > (duration - 1) as f64 {
            return Err(Error::InfeasibleGeometry(format!(
                "{}: apex reached after {t_apex:.1} frames, set lasts {duration}",
                t.label
            )));
        }
        let v0 = g * t_apex;
        let last = (duration - 1) as f64;
        let set: Vec<Point2> = (0..duration)
            .map(|i| {
                let s = i as f64;
                Point2::new(sx + (ex - sx) * s / last, y0 + v0 * s - 0.5 * g * s * s)
            })
            .collect();

        // The pass drops into the setter from the hitter's side, starting at
        // the top of its own arc.
        let pass_from = (sx + 0.2 * cal.span()).min(cal.rnx);
        let pass_end_y = y0 + 0.05 * nw;
        let pl = (pass_len - 1) as f64;
        let pass: Vec<Point2> = (0..pass_len)
            .map(|i| {
                let s = i as f64;
                Point2::new(
                    pass_from + (sx - pass_from) * s / pl,
                    pass_end_y + 0.5 * g * (pl * pl - s * s),
                )
            })
            .collect();

        for p in pass.iter().chain(set.iter()) {
            if p.y < 0.0 || p.y > cal.frame_height {
                return Err(Error::InfeasibleGeometry(format!(
                    "{}: ball leaves the frame at y {:.1}",
                    t.label, p.y
                )));
            }
        }
        Ok(NominalRound { pass, set })
    }

    /// Generate one round. `back_row` overrides the truth flag; by default
    /// it is true for `DBall` templates and false otherwise.
    pub fn generate(
        &self,
        t: &TacticTemplate,
        noise: &NoiseConfig,
        key: RoundKey,
        back_row: Option<bool>,
    ) -> Result<LabeledRound> {
        noise.validate()?;
        let cal = &self.calibration;
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let NominalRound { pass, set } = self.nominal(t, &mut rng)?;

        let truth_back_row = back_row.unwrap_or(t.label == TacticLabel::DBall);
        let truth = match t.label {
            TacticLabel::DBall | TacticLabel::Oppo if truth_back_row => TacticLabel::DBall,
            TacticLabel::DBall | TacticLabel::Oppo => TacticLabel::Oppo,
            other => other,
        };

        // Reversed steps after the last set point, zig-zagging in y.
        let span_scale = cal.span() / 800.0;
        let end = *set.last().expect("set has at least three points");
        let dir = if set[set.len() - 1].x >= set[0].x { 1.0 } else { -1.0 };
        let tail: Vec<Point2> = (1..=noise.tail_fp_count)
            .map(|j| {
                let jf = j as f64;
                let dy = if j % 2 == 1 { TAIL_STEP_Y } else { -TAIL_STEP_Y };
                Point2::new(end.x - jf * TAIL_STEP_X * span_scale * dir, end.y + dy * span_scale)
            })
            .collect();

        let mirror = key.possessing_team() == Team::A;
        let place = |p: Point2| {
            let x = if mirror { cal.mirror_x(p.x) } else { p.x };
            Point2::new(quantize(x), quantize(p.y))
        };

        let lead = self.motion.lead_in_frames as u64;
        let pass_start = lead;
        let set_start = pass_start + pass.len() as u64 + self.motion.contact_gap_frames as u64;
        let tail_start = set_start + set.len() as u64;
        let last_frame = tail_start + tail.len() as u64;

        let ball = |position: Point2| Candidate {
            position,
            area: self.motion.ball_area,
            circularity: self.motion.ball_circularity,
            score: self.motion.ball_score,
        };

        let mut frames: Vec<Vec<Candidate>> = vec![Vec::new(); last_frame as usize];
        let mut dropped = 0;
        let ball_frames = pass.len() + set.len();
        let timeline = pass
            .iter()
            .enumerate()
            .map(|(i, p)| (pass_start + i as u64, *p))
            .chain(set.iter().enumerate().map(|(i, p)| (set_start + i as u64, *p)));
        for (frame, p) in timeline {
            // Draw every variate unconditionally so that changing one rate
            // leaves the other streams untouched.
            let u: f64 = rng.random();
            let jx: f64 = rng.sample(StandardNormal);
            let jy: f64 = rng.sample(StandardNormal);
            if u < noise.dropout_rate {
                dropped += 1;
                continue;
            }
            let jittered = Point2::new(p.x + noise.jitter_sigma * jx, p.y + noise.jitter_sigma * jy);
            frames[frame as usize].push(ball(place(jittered)));
        }
        for (j, p) in tail.iter().enumerate() {
            frames[(tail_start + j as u64) as usize].push(ball(place(*p)));
        }
        if noise.clutter_rate > 0.0 {
            for (frame, cands) in frames.iter_mut().enumerate() {
                cands.extend(self.clutter(noise, frame as u64));
            }
        }

        let records = frames
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(frame, mut candidates)| {
                candidates.sort_by(|a, b| b.score.total_cmp(&a.score));
                DetectionRecord {
                    frame_index: frame as u64,
                    candidates,
                }
            })
            .collect();

        Ok(LabeledRound {
            records,
            truth,
            round_key: key,
            truth_back_row,
            ball_frames,
            dropped,
        })
    }

    /// Clutter for one frame from its own stream. Arrivals are unit-rate
    /// exponential gaps cut off at `clutter_rate`, so a higher rate always
    /// yields a superset of the candidates of a lower one.
    fn clutter(&self, noise: &NoiseConfig, frame: u64) -> Vec<Candidate> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(mix_seed(noise.seed, 0xC1u64), frame));
        let mut out = Vec::new();
        let mut t: f64 = rng.sample(Exp1);
        while t < noise.clutter_rate {
            let x: f64 = rng.random_range(0.0..self.frame_width);
            let y: f64 = rng.random_range(0.0..self.calibration.frame_height);
            let area: f64 = rng.random_range(40.0..400.0);
            let circularity: f64 = rng.random_range(0.3..1.0);
            let score: f64 = rng.random();
            out.push(Candidate {
                position: Point2::new(quantize(x), quantize(y)),
                area,
                circularity,
                score,
            });
            t += rng.sample::<f64, _>(Exp1);
        }
        out
    }

    /// Noise-free path for a seed, mirrored for `team`. For inspection and
    /// tests.
    pub fn nominal_path(&self, t: &TacticTemplate, seed: u64, team: Team) -> Result<NominalRound> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut n = self.nominal(t, &mut rng)?;
        if team == Team::A {
            for p in n.pass.iter_mut().chain(n.set.iter_mut()) {
                p.x = self.calibration.mirror_x(p.x);
            }
        }
        Ok(n)
    }
}

/// [`Simulator::generate`] with default motion and a reference-width
/// frame.
pub fn generate_round(
    template: &TacticTemplate,
    noise: &NoiseConfig,
    cal: &NetCalibration,
    key: RoundKey,
) -> Result<LabeledRound> {
    Simulator::new(*cal, REFERENCE_WIDTH, MotionConfig::default()).generate(template, noise, key, None)
}

/// Classify a generated round with its ground-truth rotation context.
pub fn run_pipeline(round: &LabeledRound, mode: FilterMode, config: &EngineConfig) -> Result<Prediction> {
    let engine = Engine::from_config(config)?.with_mode(mode);
    Ok(engine.analyze(&round.records, &round.context())?.prediction)
}

/// The synthetic calibration used by defaults and tests: 1280x720, net
/// from x 240 to 1040, top at image y 360, bottom at image y 560.
pub fn reference_config() -> EngineConfig {
    EngineConfig::new(crate::config::CalibrationConfig {
        lnx: 240.0,
        rnx: 1040.0,
        uny: 360.0,
        lny: 560.0,
        frame_width: 1280.0,
        frame_height: 720.0,
    })
}
