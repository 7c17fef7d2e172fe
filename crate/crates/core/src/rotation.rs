//! Opposite-hitter rotation tracking.
//!
//! Each round clip is keyed `score_round_team`: the rally ordinal within
//! the set, the possession ordinal within the rally, and the team that
//! received serve in that rally. When the receiving team changes between
//! rallies, the previous receiver won a side-out and gained serve, so its
//! players rotate one position clockwise (2 -> 1, 1 -> 6).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    A,
    B,
}

impl Team {
    pub fn other(self) -> Team {
        match self {
            Team::A => Team::B,
            Team::B => Team::A,
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Team::A => "a",
            Team::B => "b",
        })
    }
}

impl FromStr for Team {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Team::A),
            "b" | "B" => Ok(Team::B),
            _ => Err(Error::MalformedRoundKey(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundKey {
    pub score: u32,
    pub round: u32,
    pub team: Team,
}

impl RoundKey {
    pub fn new(score: u32, round: u32, team: Team) -> Self {
        Self { score, round, team }
    }

    /// The team in possession during this round. Possession alternates
    /// within a rally, starting with the serve receiver.
    pub fn possessing_team(&self) -> Team {
        if self.round % 2 == 1 {
            self.team
        } else {
            self.team.other()
        }
    }
}

impl fmt::Display for RoundKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.score, self.round, self.team)
    }
}

impl FromStr for RoundKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_round_key(s)
    }
}

/// Parse `<score>_<round>_<a|b>`; both ordinals must be at least 1.
pub fn parse_round_key(name: &str) -> Result<RoundKey> {
    let bad = || Error::MalformedRoundKey(name.to_string());
    let mut parts = name.split('_');
    let (Some(score), Some(round), Some(team), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
        return Err(bad());
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(score) || !digits(round) {
        return Err(bad());
    }
    let score: u32 = score.parse().map_err(|_| bad())?;
    let round: u32 = round.parse().map_err(|_| bad())?;
    if score == 0 || round == 0 {
        return Err(bad());
    }
    let team = team.parse::<Team>().map_err(|_| bad())?;
    Ok(RoundKey { score, round, team })
}

/// Rotation position on court, 1 through 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Position(u8);

impl Position {
    pub fn new(pos: u8) -> Result<Self> {
        if (1..=6).contains(&pos) {
            Ok(Position(pos))
        } else {
            Err(Error::InvalidPosition(pos))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// One clockwise step: `(pos - 1) mod 6`, with 0 mapped to 6.
    pub fn rotate_back(self) -> Position {
        let r = (self.0 - 1) % 6;
        Position(if r == 0 { 6 } else { r })
    }

    /// Positions 1, 5 and 6 are the back row.
    pub fn is_back_row(self) -> bool {
        matches!(self.0, 1 | 5 | 6)
    }
}

impl TryFrom<u8> for Position {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Position::new(v)
    }
}

impl From<Position> for u8 {
    fn from(p: Position) -> u8 {
        p.0
    }
}

pub fn rotate_back(pos: u8) -> Result<u8> {
    Ok(Position::new(pos)?.rotate_back().get())
}

pub fn is_back_row(pos: u8) -> Result<bool> {
    Ok(Position::new(pos)?.is_back_row())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationState {
    pub opp_a: Position,
    pub opp_b: Position,
}

impl RotationState {
    pub fn new(opp_a: u8, opp_b: u8) -> Result<Self> {
        Ok(Self {
            opp_a: Position::new(opp_a)?,
            opp_b: Position::new(opp_b)?,
        })
    }

    pub fn back_row(&self, team: Team) -> bool {
        match team {
            Team::A => self.opp_a.is_back_row(),
            Team::B => self.opp_b.is_back_row(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BackRowFlags {
    pub back_row_a: Vec<bool>,
    pub back_row_b: Vec<bool>,
}

/// Incremental form of the rotation check, fed one round at a time.
///
/// The side-out trigger is evaluated on the first round of each new rally,
/// against the rally just finished: a change of receiving team there means
/// the previous receiver won and now serves, so that team rotates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationTracker {
    state: RotationState,
    previous: Option<RoundKey>,
}

impl RotationTracker {
    pub fn new(initial: RotationState) -> Self {
        Self {
            state: initial,
            previous: None,
        }
    }

    pub fn state(&self) -> RotationState {
        self.state
    }

    pub fn previous(&self) -> Option<RoundKey> {
        self.previous
    }

    /// Advance to `key` and return the positions in effect for it.
    pub fn advance(&mut self, key: RoundKey) -> RotationState {
        if let Some(prev) = self.previous {
            if key.score != prev.score && key.team != prev.team {
                match key.team {
                    Team::A => self.state.opp_b = self.state.opp_b.rotate_back(),
                    Team::B => self.state.opp_a = self.state.opp_a.rotate_back(),
                }
            }
        }
        self.previous = Some(key);
        self.state
    }
}

/// Back-row flags for both opposites, one per round.
pub fn rotation_check(pos_a: u8, pos_b: u8, files: &[RoundKey]) -> Result<BackRowFlags> {
    let mut tracker = RotationTracker::new(RotationState::new(pos_a, pos_b)?);
    let mut flags = BackRowFlags::default();
    for &key in files {
        let s = tracker.advance(key);
        flags.back_row_a.push(s.opp_a.is_back_row());
        flags.back_row_b.push(s.opp_b.is_back_row());
    }
    Ok(flags)
}

/// [`rotation_check`] over file names, propagating parse errors.
pub fn rotation_check_names<S: AsRef<str>>(pos_a: u8, pos_b: u8, files: &[S]) -> Result<BackRowFlags> {
    let keys = files
        .iter()
        .map(|f| parse_round_key(f.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    rotation_check(pos_a, pos_b, &keys)
}
