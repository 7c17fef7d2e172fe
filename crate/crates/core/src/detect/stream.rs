//! Detection-stream files: newline-delimited JSON, one object per frame,
//!
//! ```text
//! {"frame":12,"candidates":[{"x":640.5,"y":210.0,"area":96.0,"circularity":0.91,"score":0.88}]}
//! ```
//!
//! Coordinates on the wire are image pixels (y down). Reading converts to
//! court-view; writing converts back.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Candidate, DetectionRecord};
use crate::error::{Error, Result};
use crate::geometry::{to_court_view, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub area: f64,
    #[serde(default)]
    pub circularity: f64,
    #[serde(default)]
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRecord {
    pub frame: u64,
    #[serde(default)]
    pub candidates: Vec<WireCandidate>,
}

impl WireRecord {
    pub fn into_record(self, frame_height: f64) -> DetectionRecord {
        DetectionRecord {
            frame_index: self.frame,
            candidates: self
                .candidates
                .into_iter()
                .map(|c| Candidate {
                    position: to_court_view(Point2::new(c.x, c.y), frame_height),
                    area: c.area,
                    circularity: c.circularity,
                    score: c.score,
                })
                .collect(),
        }
    }

    pub fn from_record(r: &DetectionRecord, frame_height: f64) -> Self {
        WireRecord {
            frame: r.frame_index,
            candidates: r
                .candidates
                .iter()
                .map(|c| {
                    let p = to_court_view(c.position, frame_height);
                    WireCandidate {
                        x: p.x,
                        y: p.y,
                        area: c.area,
                        circularity: c.circularity,
                        score: c.score,
                    }
                })
                .collect(),
        }
    }
}

/// Convert wire records, rejecting non-increasing frame indices.
pub fn from_wire(records: Vec<WireRecord>, frame_height: f64) -> Result<Vec<DetectionRecord>> {
    let mut out = Vec::with_capacity(records.len());
    let mut prev: Option<u64> = None;
    for (i, r) in records.into_iter().enumerate() {
        if let Some(p) = prev {
            if r.frame <= p {
                return Err(Error::MalformedRecord {
                    line: i + 1,
                    message: format!("frame {} does not follow frame {}", r.frame, p),
                });
            }
        }
        prev = Some(r.frame);
        out.push(r.into_record(frame_height));
    }
    Ok(out)
}

/// Parse a detection stream. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn read_detections<R: BufRead>(reader: R, frame_height: f64) -> Result<Vec<DetectionRecord>> {
    let mut wire = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let rec: WireRecord = serde_json::from_str(trimmed).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        wire.push(rec);
        lines.push(i + 1);
    }
    // Report ordering errors against the physical line, not the record count.
    from_wire(wire, frame_height).map_err(|e| match e {
        Error::MalformedRecord { line, message } => Error::MalformedRecord {
            line: lines[line - 1],
            message,
        },
        other => other,
    })
}

pub fn write_detections<W: Write>(records: &[DetectionRecord], frame_height: f64, mut w: W) -> Result<()> {
    for r in records {
        let line =
            serde_json::to_string(&WireRecord::from_record(r, frame_height)).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}
