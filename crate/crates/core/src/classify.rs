//! Setting-tactic classification from the setting trajectory.
//!
//! The setter is taken at the start of the trajectory and the hitter at its
//! end. Rules are written for team B receiving; team A is handled by
//! reflecting x about the net midline and using team A's back-row flag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CourtSections, NetCalibration, TacticCoefficients};
use crate::rotation::Team;
use crate::track::Trajectory;

/// Number of highest points averaged into the set height.
pub const APEX_SAMPLES: usize = 5;
/// Points averaged at each end for the setter and hitter positions.
pub const END_SAMPLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TacticLabel {
    Quick,
    ThirtyOne,
    BackOne,
    Short,
    Outside,
    Bic,
    DBall,
    Oppo,
    Unknown,
}

impl TacticLabel {
    pub const ALL: [TacticLabel; 9] = [
        TacticLabel::Quick,
        TacticLabel::ThirtyOne,
        TacticLabel::BackOne,
        TacticLabel::Short,
        TacticLabel::Outside,
        TacticLabel::Bic,
        TacticLabel::DBall,
        TacticLabel::Oppo,
        TacticLabel::Unknown,
    ];

    /// The eight concrete tactics, without `Unknown`.
    pub const TACTICS: [TacticLabel; 8] = [
        TacticLabel::Quick,
        TacticLabel::ThirtyOne,
        TacticLabel::BackOne,
        TacticLabel::Short,
        TacticLabel::Outside,
        TacticLabel::Bic,
        TacticLabel::DBall,
        TacticLabel::Oppo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TacticLabel::Quick => "quick",
            TacticLabel::ThirtyOne => "thirty_one",
            TacticLabel::BackOne => "back_one",
            TacticLabel::Short => "short",
            TacticLabel::Outside => "outside",
            TacticLabel::Bic => "bic",
            TacticLabel::DBall => "d_ball",
            TacticLabel::Oppo => "oppo",
            TacticLabel::Unknown => "unknown",
        }
    }
}

impl fmt::Display for TacticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TacticLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TacticLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown tactic label {s:?}")))
    }
}

/// Classifier output for a round: a tactic, or no usable setting
/// trajectory at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Prediction {
    Tactic(TacticLabel),
    NoSet,
}

impl Prediction {
    pub fn label(self) -> Option<TacticLabel> {
        match self {
            Prediction::Tactic(l) => Some(l),
            Prediction::NoSet => None,
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Tactic(l) => l.fmt(f),
            Prediction::NoSet => f.write_str("no_set"),
        }
    }
}

impl From<Prediction> for String {
    fn from(p: Prediction) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Prediction {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        if s == "no_set" {
            Ok(Prediction::NoSet)
        } else {
            Ok(Prediction::Tactic(s.parse()?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFeatures {
    /// Setter x: mean of the first three points.
    pub sp: f64,
    /// Hitter x: mean of the last three points.
    pub hp: f64,
    /// Mean y of the five highest points.
    pub hya: f64,
    /// `hp - sp`.
    pub xd: f64,
    /// Net width, `uny - lny`.
    pub nw: f64,
    /// Mean y of the first three points. Informational only.
    pub setter_height: f64,
    /// Mean y of the last three points. Informational only.
    pub hitter_height: f64,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

pub fn compute_features(b: &Trajectory, cal: &NetCalibration) -> Result<TrajectoryFeatures> {
    if b.is_sentinel() {
        return Err(Error::Unclassifiable);
    }
    let pts = &b.points;
    if pts.len() < END_SAMPLES {
        return Err(Error::TooFewPoints {
            needed: END_SAMPLES,
            got: pts.len(),
        });
    }
    let head = &pts[..END_SAMPLES];
    let tail = &pts[pts.len() - END_SAMPLES..];
    let sp = mean(head.iter().map(|p| p.x));
    let hp = mean(tail.iter().map(|p| p.x));
    let mut ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    ys.sort_by(|a, b| b.total_cmp(a));
    let hya = mean(ys.iter().take(APEX_SAMPLES).copied());
    Ok(TrajectoryFeatures {
        sp,
        hp,
        hya,
        xd: hp - sp,
        nw: cal.net_width(),
        setter_height: mean(head.iter().map(|p| p.y)),
        hitter_height: mean(tail.iter().map(|p| p.y)),
    })
}

/// Who is receiving, and whether each team's opposite is in the back row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetContext {
    pub tr: Team,
    pub bra: bool,
    pub brb: bool,
}

impl SetContext {
    pub fn new(tr: Team, bra: bool, brb: bool) -> Self {
        Self { tr, bra, brb }
    }

    /// Back-row flag of the receiving team's opposite.
    pub fn receiving_back_row(&self) -> bool {
        match self.tr {
            Team::A => self.bra,
            Team::B => self.brb,
        }
    }
}

/// The rule chain in team-B orientation. First matching rule wins.
#[allow(clippy::too_many_arguments)]
fn classify_oriented(
    sp: f64,
    hp: f64,
    hya: f64,
    nw: f64,
    back_row: bool,
    sec: &CourtSections,
    coef: &TacticCoefficients,
    cal: &NetCalibration,
) -> TacticLabel {
    let span = cal.rnx - cal.lnx;
    let xd = hp - sp;
    let mid12 = sec.p1 + 0.5 * (sec.p2 - sec.p1);
    let mid34 = sec.p3 + 0.5 * (sec.p4 - sec.p3);

    if xd > 0.0 && xd <= span / 5.0 && hya > coef.q * nw {
        TacticLabel::Quick
    } else if xd > span / 2.0 && xd <= 1.5 * span && hp > 1.5 * sec.p1 && hp < sec.p4 && hya > coef.m * nw {
        TacticLabel::ThirtyOne
    } else if xd < 0.0 && xd.abs() <= span / 3.0 && hya > coef.q * nw {
        TacticLabel::BackOne
    } else if sp < sec.p3 && sp > sec.p1 && hp > sec.p3 && hp < sec.p4 && hya > coef.s * nw {
        TacticLabel::Short
    } else if hp > mid34 {
        TacticLabel::Outside
    } else if hp > mid12 && hp < mid34 && hya < coef.c * nw {
        TacticLabel::Bic
    } else if hp < mid12 {
        if back_row {
            TacticLabel::DBall
        } else {
            TacticLabel::Oppo
        }
    } else {
        TacticLabel::Unknown
    }
}

/// Classify a set. Total: anything no rule claims is `Unknown`.
pub fn classify(
    f: &TrajectoryFeatures,
    sec: &CourtSections,
    coef: &TacticCoefficients,
    ctx: &SetContext,
    cal: &NetCalibration,
) -> TacticLabel {
    match ctx.tr {
        Team::B => classify_oriented(f.sp, f.hp, f.hya, f.nw, ctx.brb, sec, coef, cal),
        Team::A => classify_oriented(
            cal.mirror_x(f.sp),
            cal.mirror_x(f.hp),
            f.hya,
            f.nw,
            ctx.bra,
            sec,
            coef,
            cal,
        ),
    }
}

/// Features and label for an extracted setting trajectory, or `NoSet` for
/// the sentinel.
pub fn classify_trajectory(
    b: &Trajectory,
    cal: &NetCalibration,
    coef: &TacticCoefficients,
    ctx: &SetContext,
) -> Result<(Prediction, Option<TrajectoryFeatures>)> {
    if b.is_sentinel() {
        return Ok((Prediction::NoSet, None));
    }
    let sec = cal.sections()?;
    let f = compute_features(b, cal)?;
    Ok((Prediction::Tactic(classify(&f, &sec, coef, ctx, cal)), Some(f)))
}
