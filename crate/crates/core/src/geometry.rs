//! Court-frame coordinates and net calibration.
//!
//! Everything downstream of detection works in *court-view* coordinates:
//! `x` grows to the right and `y` grows upward, so a ball higher on screen
//! has a larger `y`. Image coordinates (y down) are converted exactly once,
//! at ingestion, with [`to_court_view`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Flip between image coordinates (y down) and court-view (y up).
///
/// The map `y -> frame_height - y` is its own inverse.
pub fn to_court_view(p: Point2, frame_height: f64) -> Point2 {
    Point2::new(p.x, frame_height - p.y)
}

/// Net extremes in court-view pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetCalibration {
    /// x of the left end of the net.
    pub lnx: f64,
    /// x of the right end of the net.
    pub rnx: f64,
    /// y of the top of the net (court-view, so `uny > lny`).
    pub uny: f64,
    /// y of the bottom of the net.
    pub lny: f64,
    pub frame_height: f64,
}

impl NetCalibration {
    /// Build from values already in court-view coordinates.
    pub fn new(lnx: f64, rnx: f64, uny: f64, lny: f64, frame_height: f64) -> Result<Self> {
        let cal = Self {
            lnx,
            rnx,
            uny,
            lny,
            frame_height,
        };
        cal.validate()?;
        Ok(cal)
    }

    /// Build from operator-entered image coordinates, where the top of the
    /// net has the *smaller* y.
    pub fn from_image(lnx: f64, rnx: f64, uny: f64, lny: f64, frame_height: f64) -> Result<Self> {
        if !(frame_height > 0.0) {
            return Err(Error::InvalidCalibration(format!(
                "frame_height must be positive, got {frame_height}"
            )));
        }
        Self::new(lnx, rnx, frame_height - uny, frame_height - lny, frame_height)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.lnx, self.rnx, self.uny, self.lny, self.frame_height];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCalibration("non-finite value".into()));
        }
        if self.lnx >= self.rnx {
            return Err(Error::InvalidCalibration(format!(
                "lnx ({}) must be left of rnx ({})",
                self.lnx, self.rnx
            )));
        }
        if self.uny <= self.lny {
            return Err(Error::InvalidCalibration(format!(
                "net top ({}) must be above net bottom ({}) in court view",
                self.uny, self.lny
            )));
        }
        if self.lnx < 0.0 || self.lny < 0.0 || self.uny > self.frame_height {
            return Err(Error::InvalidCalibration(
                "net coordinates fall outside the frame".into(),
            ));
        }
        Ok(())
    }

    /// Horizontal extent of the net, `rnx - lnx`.
    pub fn span(&self) -> f64 {
        self.rnx - self.lnx
    }

    /// Vertical extent of the net, `uny - lny`. Called "net width" by the
    /// tactic rules, which scale every height gate by it.
    pub fn net_width(&self) -> f64 {
        self.uny - self.lny
    }

    /// Reflect an x coordinate about the net midline.
    pub fn mirror_x(&self, x: f64) -> f64 {
        self.lnx + self.rnx - x
    }

    pub fn sections(&self) -> Result<CourtSections> {
        calculate_areas(self)
    }
}

/// The four interior boundaries splitting the net span into five equal
/// sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CourtSections {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

pub fn calculate_areas(cal: &NetCalibration) -> Result<CourtSections> {
    if !(cal.lnx < cal.rnx) {
        return Err(Error::InvalidCalibration(format!(
            "lnx ({}) must be left of rnx ({})",
            cal.lnx, cal.rnx
        )));
    }
    let step = (cal.rnx - cal.lnx) / 5.0;
    Ok(CourtSections {
        p1: cal.lnx + step,
        p2: cal.lnx + 2.0 * step,
        p3: cal.lnx + 3.0 * step,
        p4: cal.lnx + 4.0 * step,
    })
}

/// Height and distance multipliers used by the tactic rules, all expressed
/// as multiples of the net width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TacticCoefficients {
    pub q: f64,
    pub m: f64,
    pub s: f64,
    pub c: f64,
}

impl Default for TacticCoefficients {
    fn default() -> Self {
        Self {
            q: 1.2,
            m: 1.5,
            s: 1.0,
            c: 0.9,
        }
    }
}

impl TacticCoefficients {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("q", self.q), ("m", self.m), ("s", self.s), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "coefficient {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}
