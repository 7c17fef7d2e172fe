//! Benchmark sets, scripted matches, and their on-disk layout.
//!
//! A dataset directory holds one detection stream per round named
//! `score_round_team.ndjson`, a `manifest.json` with the ground truth, and
//! the `config.toml` the rounds were generated against.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{mix_seed, LabeledRound, NoiseConfig, Simulator, TemplateSet};
use crate::classify::TacticLabel;
use crate::config::{EngineConfig, InitialPositions};
use crate::detect::stream::{read_detections, write_detections};
use crate::error::{Error, Result};
use crate::rotation::{RoundKey, Team};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRound {
    pub file: String,
    pub round_key: RoundKey,
    pub truth: TacticLabel,
    pub truth_back_row: bool,
    pub ball_frames: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub initial_positions: Option<InitialPositions>,
    pub rounds: Vec<ManifestRound>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: EngineConfig,
    pub manifest: Manifest,
    pub rounds: Vec<LabeledRound>,
}

fn get_template(set: &TemplateSet, label: TacticLabel) -> Result<&super::TemplateSpec> {
    set.get(label)
        .ok_or_else(|| Error::InvalidParameter(format!("template set has no {label} template")))
}

/// `per_tactic` independent rounds for each of the eight tactics, in
/// tactic order. Sides alternate B, A within each tactic.
pub fn generate_benchmark(
    sim: &Simulator,
    set: &TemplateSet,
    noise: &NoiseConfig,
    per_tactic: usize,
    seed: u64,
) -> Result<Vec<LabeledRound>> {
    let mut out = Vec::with_capacity(per_tactic * TacticLabel::TACTICS.len());
    for label in TacticLabel::TACTICS {
        let template = get_template(set, label)?.resolve(&sim.calibration);
        for i in 0..per_tactic {
            let idx = out.len();
            let round_seed = mix_seed(seed, idx as u64);
            let team = if i % 2 == 0 { Team::B } else { Team::A };
            let key = RoundKey::new(idx as u32 + 1, 1, team);
            let back_row = match label {
                TacticLabel::DBall => true,
                TacticLabel::Oppo => false,
                _ => round_seed & 1 == 1,
            };
            out.push(sim.generate(&template, &noise.with_seed(round_seed), key, Some(back_row))?);
        }
    }
    Ok(out)
}

/// Six players per team, rotating clockwise on every side-out. Player 0 is
/// the opposite.
#[derive(Debug, Clone, Copy)]
struct Lineup {
    positions: [u8; 6],
}

impl Lineup {
    fn new(opposite_at: u8) -> Self {
        let mut positions = [0u8; 6];
        for (i, p) in positions.iter_mut().enumerate() {
            *p = (opposite_at - 1 + i as u8) % 6 + 1;
        }
        Self { positions }
    }

    fn rotate(&mut self) {
        for p in self.positions.iter_mut() {
            *p = if *p == 1 { 6 } else { *p - 1 };
        }
    }

    fn opposite_back_row(&self) -> bool {
        matches!(self.positions[0], 1 | 5 | 6)
    }
}

/// Geometries a scripted round can use; the opposite attack becomes DBall
/// or Oppo depending on where the opposite stands.
const MATCH_TACTICS: [TacticLabel; 7] = [
    TacticLabel::Quick,
    TacticLabel::ThirtyOne,
    TacticLabel::BackOne,
    TacticLabel::Short,
    TacticLabel::Outside,
    TacticLabel::Bic,
    TacticLabel::Oppo,
];

/// A scripted single-set match of `count` rounds. Rally winners are random;
/// the receiving team rotates whenever it wins the rally, and the truth
/// label of each opposite attack follows the six-player lineup.
pub fn generate_match(
    sim: &Simulator,
    set: &TemplateSet,
    noise: &NoiseConfig,
    count: usize,
    seed: u64,
    initial: InitialPositions,
) -> Result<Vec<LabeledRound>> {
    initial.state()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x4D41_5443));
    let mut lineup_a = Lineup::new(initial.pos_a);
    let mut lineup_b = Lineup::new(initial.pos_b);
    let mut receiving = if rng.random::<bool>() { Team::A } else { Team::B };
    let mut out = Vec::with_capacity(count);
    let mut score = 1u32;
    while out.len() < count {
        let roll: f64 = rng.random();
        let rounds = if roll < 0.55 {
            1
        } else if roll < 0.85 {
            2
        } else {
            3
        };
        for r in 1..=rounds {
            if out.len() == count {
                break;
            }
            let key = RoundKey::new(score, r, receiving);
            let back_row = match key.possessing_team() {
                Team::A => lineup_a.opposite_back_row(),
                Team::B => lineup_b.opposite_back_row(),
            };
            let label = MATCH_TACTICS[rng.random_range(0..MATCH_TACTICS.len())];
            let template = get_template(set, label)?.resolve(&sim.calibration);
            let round_seed = mix_seed(seed, out.len() as u64);
            out.push(sim.generate(&template, &noise.with_seed(round_seed), key, Some(back_row))?);
        }
        let receiver_won = rng.random::<bool>();
        if receiver_won {
            match receiving {
                Team::A => lineup_a.rotate(),
                Team::B => lineup_b.rotate(),
            }
            receiving = receiving.other();
        }
        score += 1;
    }
    Ok(out)
}

/// Write rounds, manifest and config into `dir`, creating it if needed.
pub fn write_dataset(dir: &Path, rounds: &[LabeledRound], config: &EngineConfig, seed: u64) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let frame_height = config.calibration.frame_height;
    let mut entries = Vec::with_capacity(rounds.len());
    for r in rounds {
        let file = format!("{}.ndjson", r.round_key);
        let mut w = BufWriter::new(File::create(dir.join(&file))?);
        write_detections(&r.records, frame_height, &mut w)?;
        w.flush()?;
        entries.push(ManifestRound {
            file,
            round_key: r.round_key,
            truth: r.truth,
            truth_back_row: r.truth_back_row,
            ball_frames: r.ball_frames,
            dropped: r.dropped,
        });
    }
    let manifest = Manifest {
        seed,
        initial_positions: config.initial_positions.first().copied(),
        rounds: entries,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST_FILE), json)?;
    std::fs::write(dir.join(CONFIG_FILE), config.to_toml_string()?)?;
    Ok(manifest)
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let config = EngineConfig::load(&dir.join(CONFIG_FILE))?;
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))
        .map_err(|e| Error::Io(format!("{}: {e}", dir.join(MANIFEST_FILE).display())))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Config(format!("manifest: {e}")))?;
    let frame_height = config.calibration.frame_height;
    let rounds = manifest
        .rounds
        .iter()
        .map(|m| {
            let f = File::open(dir.join(&m.file)).map_err(|e| Error::Io(format!("{}: {e}", m.file)))?;
            Ok(LabeledRound {
                records: read_detections(BufReader::new(f), frame_height)?,
                truth: m.truth,
                round_key: m.round_key,
                truth_back_row: m.truth_back_row,
                ball_frames: m.ball_frames,
                dropped: m.dropped,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        config,
        manifest,
        rounds,
    })
}
