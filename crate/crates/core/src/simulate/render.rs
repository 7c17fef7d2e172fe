//! Grey-level frames for exercising the detector: a static textured
//! background with every candidate drawn as a bright disk.

use crate::detect::{Candidate, DetectionRecord, Frame};
use crate::geometry::to_court_view;

const BALL_LEVEL: f32 = 235.0;

#[derive(Debug, Clone)]
pub struct FrameRenderer {
    pub width: usize,
    pub height: usize,
    background: Vec<f32>,
}

impl FrameRenderer {
    pub fn new(width: usize, height: usize, seed: u64) -> Self {
        let mut background = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let h = super::mix_seed(seed, (y * width + x) as u64);
                let grain = (h % 7) as f32 - 3.0;
                let shade = 60.0 + 40.0 * x as f32 / width as f32 + 15.0 * (y as f32 / 37.0).sin();
                background.push(shade + grain);
            }
        }
        Self {
            width,
            height,
            background,
        }
    }

    /// One frame with the given court-view candidates drawn in.
    pub fn render(&self, index: u64, fps: f64, candidates: &[Candidate]) -> Frame {
        let mut pixels = self.background.clone();
        let h = self.height as f64;
        for c in candidates {
            let p = to_court_view(c.position, h);
            let r = (c.area / std::f64::consts::PI).sqrt().max(1.0);
            let (x0, x1) = (
                (p.x - r).floor().max(0.0) as usize,
                (p.x + r).ceil().min(self.width as f64 - 1.0),
            );
            let (y0, y1) = ((p.y - r).floor().max(0.0) as usize, (p.y + r).ceil().min(h - 1.0));
            if x1 < 0.0 || y1 < 0.0 {
                continue;
            }
            for y in y0..=y1 as usize {
                for x in x0..=x1 as usize {
                    let (dx, dy) = (x as f64 + 0.5 - p.x, y as f64 + 0.5 - p.y);
                    if dx * dx + dy * dy <= r * r {
                        pixels[y * self.width + x] = BALL_LEVEL;
                    }
                }
            }
        }
        Frame {
            width: self.width,
            height: self.height,
            pixels,
            index,
            timestamp: index as f64 / fps,
        }
    }

    /// Every frame from 0 through the last record, empty frames included.
    pub fn render_round<'a>(&'a self, records: &'a [DetectionRecord], fps: f64) -> impl Iterator<Item = Frame> + 'a {
        let last = records.last().map(|r| r.frame_index + 1).unwrap_or(0);
        let mut next = 0usize;
        (0..last).map(move |i| {
            let cands: &[Candidate] = if next < records.len() && records[next].frame_index == i {
                next += 1;
                &records[next - 1].candidates
            } else {
                &[]
            };
            self.render(i, fps, cands)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{Detector, DetectorConfig};
    use crate::geometry::Point2;

    fn ball(x: f64, y: f64) -> Candidate {
        Candidate {
            position: Point2::new(x, y),
            area: 80.0,
            circularity: 0.9,
            score: 0.9,
        }
    }

    #[test]
    fn disk_drawn_at_image_position() {
        let r = FrameRenderer::new(64, 48, 1);
        let f = r.render(0, 24.0, &[ball(20.0, 40.0)]);
        // Court-view y 40 is image row 8.
        assert_eq!(f.get(20, 8), BALL_LEVEL);
        assert!(f.get(40, 30) < 200.0);
    }

    #[test]
    fn detector_finds_rendered_ball() {
        let r = FrameRenderer::new(320, 180, 2);
        let mut det = Detector::new(DetectorConfig::for_frame(320, 180)).unwrap();
        let recs: Vec<DetectionRecord> = (0..6)
            .map(|i| DetectionRecord {
                frame_index: i,
                candidates: if i == 0 {
                    vec![]
                } else {
                    vec![ball(50.0 + 30.0 * i as f64, 90.0)]
                },
            })
            .collect();
        let out: Vec<DetectionRecord> = r.render_round(&recs, 24.0).map(|f| det.process(&f).unwrap()).collect();
        assert_eq!(out.len(), 6);
        for (i, rec) in out.iter().enumerate().skip(1) {
            let best = rec.candidates.first().expect("ball detected");
            assert!(
                best.position.distance(&Point2::new(50.0 + 30.0 * i as f64, 90.0)) < 3.0,
                "{:?}",
                best.position
            );
        }
    }
}
