//! Match sessions: ordered round submission, rotation tracking, running
//! statistics, and an append-only log per session.
//!
//! On disk a session is a directory holding `config.json` and
//! `rounds.ndjson`, one [`RoundResult`] per line. Opening a store replays
//! every log.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

use setpath_core::analyze::Engine;
use setpath_core::classify::{Prediction, SetContext, TacticLabel, TrajectoryFeatures};
use setpath_core::config::EngineConfig;
use setpath_core::detect::DetectionRecord;
use setpath_core::rotation::{RotationState, RotationTracker, RoundKey, Team};

pub const CONFIG_FILE: &str = "config.json";
pub const LOG_FILE: &str = "rounds.ndjson";
const EVENT_BUFFER: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session {0} already exists")]
    DuplicateSession(String),
    #[error("invalid session id {0:?}: use 1-64 letters, digits, '-' or '_'")]
    InvalidSessionId(String),
    #[error("round {got} does not follow {previous}")]
    OutOfOrder { previous: RoundKey, got: RoundKey },
    #[error("round {0} was already submitted")]
    DuplicateRound(RoundKey),
    #[error("round {got} changes the receiving team within rally {}", previous.score)]
    TeamChangedWithinRally { previous: RoundKey, got: RoundKey },
    #[error(transparent)]
    Core(#[from] setpath_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundResult {
    pub round_key: RoundKey,
    /// 0-based set within the session.
    pub set_index: usize,
    pub possessing_team: Team,
    pub label: Prediction,
    pub features: Option<TrajectoryFeatures>,
    pub back_row_a: bool,
    pub back_row_b: bool,
    pub trajectory_points: usize,
    pub processing_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamDistribution {
    pub counts: BTreeMap<TacticLabel, u64>,
    /// Over labelled rounds only; all zero until the first label.
    pub fractions: BTreeMap<TacticLabel, f64>,
    pub labeled: u64,
    pub no_set: u64,
}

impl Default for TeamDistribution {
    fn default() -> Self {
        Self {
            counts: TacticLabel::ALL.iter().map(|&l| (l, 0)).collect(),
            fractions: TacticLabel::ALL.iter().map(|&l| (l, 0.0)).collect(),
            labeled: 0,
            no_set: 0,
        }
    }
}

impl TeamDistribution {
    fn add(&mut self, p: Prediction) {
        match p {
            Prediction::NoSet => self.no_set += 1,
            Prediction::Tactic(l) => {
                *self.counts.entry(l).or_default() += 1;
                self.labeled += 1;
                for (label, &n) in &self.counts {
                    self.fractions.insert(*label, n as f64 / self.labeled as f64);
                }
            }
        }
    }
}

/// Per possessing team tactic counts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TacticDistribution {
    pub team_a: TeamDistribution,
    pub team_b: TeamDistribution,
    pub rounds_total: u64,
    pub no_set: u64,
}

impl TacticDistribution {
    pub fn add(&mut self, r: &RoundResult) {
        self.rounds_total += 1;
        if r.label == Prediction::NoSet {
            self.no_set += 1;
        }
        match r.possessing_team {
            Team::A => self.team_a.add(r.label),
            Team::B => self.team_b.add(r.label),
        }
    }

    pub fn from_results<'a>(results: impl IntoIterator<Item = &'a RoundResult>) -> Self {
        let mut d = Self::default();
        for r in results {
            d.add(r);
        }
        d
    }

    pub fn team(&self, t: Team) -> &TeamDistribution {
        match t {
            Team::A => &self.team_a,
            Team::B => &self.team_b,
        }
    }
}

/// Pushed to subscribers after every accepted round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub session_id: String,
    pub result: RoundResult,
    pub stats: TacticDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundSubmission {
    pub key: RoundKey,
    /// Overrides the possessing team derived from the round number.
    pub receiving: Option<Team>,
    pub records: Vec<DetectionRecord>,
}

/// Decide whether `key` may follow `prev`. Returns true when `key` opens a
/// new set.
pub fn check_order(prev: Option<RoundKey>, key: RoundKey) -> Result<bool> {
    let Some(prev) = prev else {
        return Ok(false);
    };
    let (p, k) = ((prev.score, prev.round), (key.score, key.round));
    if k == p {
        return Err(PipelineError::DuplicateRound(key));
    }
    if k > p {
        if key.score == prev.score && key.team != prev.team {
            return Err(PipelineError::TeamChangedWithinRally {
                previous: prev,
                got: key,
            });
        }
        return Ok(false);
    }
    if k == (1, 1) {
        return Ok(true);
    }
    Err(PipelineError::OutOfOrder {
        previous: prev,
        got: key,
    })
}

#[derive(Debug)]
struct SessionState {
    rotation: Option<RotationTracker>,
    set_index: usize,
    last_key: Option<RoundKey>,
    rounds: Vec<RoundResult>,
    stats: TacticDistribution,
    log: Option<File>,
}

/// Rotation bookkeeping for a key, computed without touching the session.
struct Plan {
    rotation: RotationTracker,
    set_index: usize,
    state: RotationState,
}

pub struct Session {
    pub id: String,
    pub config: EngineConfig,
    engine: Engine,
    state: Mutex<SessionState>,
    events: broadcast::Sender<SessionEvent>,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session").field("id", &self.id).finish_non_exhaustive()
    }
}

impl Session {
    fn new(id: String, config: EngineConfig, log: Option<File>) -> Result<Self> {
        config.validate()?;
        if config.initial_positions.is_empty() {
            return Err(setpath_core::Error::Config("initial_positions needs at least one entry".into()).into());
        }
        let engine = Engine::from_config(&config)?;
        Ok(Self {
            id,
            config,
            engine,
            state: Mutex::new(SessionState {
                rotation: None,
                set_index: 0,
                last_key: None,
                rounds: Vec::new(),
                stats: TacticDistribution::default(),
                log,
            }),
            events: broadcast::channel(EVENT_BUFFER).0,
        })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, SessionState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn plan(&self, st: &SessionState, key: RoundKey) -> Result<Plan> {
        let new_set = check_order(st.last_key, key)?;
        let (mut rotation, set_index) = match (&st.rotation, new_set) {
            (Some(r), false) => (r.clone(), st.set_index),
            (None, _) => (RotationTracker::new(self.config.positions_for_set(0)?), 0),
            (Some(_), true) => {
                let next = st.set_index + 1;
                (RotationTracker::new(self.config.positions_for_set(next)?), next)
            }
        };
        let state = rotation.advance(key);
        Ok(Plan {
            rotation,
            set_index,
            state,
        })
    }

    fn commit(&self, st: &mut SessionState, plan: Plan, result: RoundResult) {
        st.rotation = Some(plan.rotation);
        st.set_index = plan.set_index;
        st.last_key = Some(result.round_key);
        st.stats.add(&result);
        st.rounds.push(result);
    }

    /// Process one round. Serial per session; the log line is written
    /// before any in-memory state changes.
    pub fn submit(&self, sub: RoundSubmission) -> Result<RoundResult> {
        let mut st = self.lock();
        let plan = self.plan(&st, sub.key)?;
        let tr = sub.receiving.unwrap_or_else(|| sub.key.possessing_team());
        let (bra, brb) = (plan.state.opp_a.is_back_row(), plan.state.opp_b.is_back_row());
        let started = Instant::now();
        let analysis = self.engine.analyze(&sub.records, &SetContext::new(tr, bra, brb))?;
        let processing_ms = started.elapsed().as_secs_f64() * 1e3;
        let result = RoundResult {
            round_key: sub.key,
            set_index: plan.set_index,
            possessing_team: tr,
            label: analysis.prediction,
            features: analysis.features,
            back_row_a: bra,
            back_row_b: brb,
            trajectory_points: if analysis.setting_trajectory.is_sentinel() {
                0
            } else {
                analysis.setting_trajectory.len()
            },
            processing_ms,
        };
        if let Some(log) = st.log.as_mut() {
            let mut line = serde_json::to_string(&result).map_err(|e| PipelineError::Io(e.to_string()))?;
            line.push('\n');
            log.write_all(line.as_bytes())?;
            log.flush()?;
        }
        self.commit(&mut st, plan, result.clone());
        let _ = self.events.send(SessionEvent {
            session_id: self.id.clone(),
            result: result.clone(),
            stats: st.stats.clone(),
        });
        Ok(result)
    }

    /// Re-apply a logged result without re-running the analysis.
    fn replay(&self, result: RoundResult) -> Result<()> {
        let mut st = self.lock();
        let plan = self.plan(&st, result.round_key)?;
        self.commit(&mut st, plan, result);
        Ok(())
    }

    pub fn stats(&self) -> TacticDistribution {
        self.lock().stats.clone()
    }

    pub fn rounds(&self) -> Vec<RoundResult> {
        self.lock().rounds.clone()
    }

    pub fn rounds_total(&self) -> usize {
        self.lock().rounds.len()
    }

    pub fn subscribe(&self) -> broadcast::Receiver<SessionEvent> {
        self.events.subscribe()
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// All sessions, optionally backed by a data directory.
#[derive(Debug, Default)]
pub struct SessionStore {
    data_dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open (creating if needed) a data directory and replay every session
    /// in it.
    pub fn open(data_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(data_dir)?;
        let mut sessions = HashMap::new();
        let mut entries: Vec<_> = std::fs::read_dir(data_dir)?.collect::<std::io::Result<Vec<_>>>()?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let path = entry.path();
            let Some(id) = path.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
                continue;
            };
            if !path.join(CONFIG_FILE).is_file() || !valid_id(&id) {
                continue;
            }
            let session = load_session(&path, id.clone())?;
            sessions.insert(id, Arc::new(session));
        }
        Ok(Self {
            data_dir: Some(data_dir.to_path_buf()),
            sessions: RwLock::new(sessions),
        })
    }

    pub fn create_session(&self, id: Option<String>, config: EngineConfig) -> Result<Arc<Session>> {
        let id = id.unwrap_or_else(|| uuid::Uuid::new_v4().simple().to_string());
        if !valid_id(&id) {
            return Err(PipelineError::InvalidSessionId(id));
        }
        let mut sessions = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        if sessions.contains_key(&id) {
            return Err(PipelineError::DuplicateSession(id));
        }
        // Validate before anything touches the disk.
        Session::new(id.clone(), config.clone(), None)?;
        let log = match &self.data_dir {
            Some(dir) => {
                let sdir = dir.join(&id);
                if sdir.exists() {
                    return Err(PipelineError::DuplicateSession(id));
                }
                std::fs::create_dir_all(&sdir)?;
                let json = serde_json::to_string_pretty(&config).map_err(|e| PipelineError::Io(e.to_string()))?;
                let tmp = sdir.join(format!("{CONFIG_FILE}.tmp"));
                std::fs::write(&tmp, json)?;
                std::fs::rename(&tmp, sdir.join(CONFIG_FILE))?;
                Some(open_log(&sdir)?)
            }
            None => None,
        };
        let session = Arc::new(Session::new(id.clone(), config, log)?);
        sessions.insert(id, session.clone());
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| PipelineError::UnknownSession(id.to_owned()))
    }

    pub fn list(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }

    pub fn submit_round(&self, id: &str, sub: RoundSubmission) -> Result<RoundResult> {
        self.get(id)?.submit(sub)
    }

    pub fn get_stats(&self, id: &str) -> Result<TacticDistribution> {
        Ok(self.get(id)?.stats())
    }
}

fn open_log(dir: &Path) -> Result<File> {
    Ok(OpenOptions::new().create(true).append(true).open(dir.join(LOG_FILE))?)
}

fn load_session(dir: &Path, id: String) -> Result<Session> {
    let text = std::fs::read_to_string(dir.join(CONFIG_FILE))?;
    let config: EngineConfig =
        serde_json::from_str(&text).map_err(|e| PipelineError::Io(format!("{}: {e}", dir.display())))?;
    let log_path = dir.join(LOG_FILE);
    let mut results = Vec::new();
    let mut good_len = 0u64;
    if log_path.exists() {
        let reader = BufReader::new(File::open(&log_path)?);
        let mut lines = reader.split(b'\n').peekable();
        let mut line_no = 0;
        while let Some(line) = lines.next() {
            let line = line?;
            line_no += 1;
            let is_last = lines.peek().is_none();
            match serde_json::from_slice::<RoundResult>(&line) {
                Ok(r) => {
                    results.push(r);
                    good_len += line.len() as u64 + 1;
                }
                Err(_) if line.iter().all(u8::is_ascii_whitespace) => good_len += line.len() as u64 + 1,
                // A torn final write from a crash: drop it.
                Err(e) if is_last => {
                    tracing::warn!(session = %id, "dropping incomplete last log line: {e}");
                }
                Err(e) => {
                    return Err(PipelineError::Io(format!("{}:{line_no}: {e}", log_path.display())));
                }
            }
        }
        let actual = std::fs::metadata(&log_path)?.len();
        if good_len < actual {
            OpenOptions::new().write(true).open(&log_path)?.set_len(good_len)?;
        }
    }
    let session = Session::new(id, config, Some(open_log(dir)?))?;
    for r in results {
        session.replay(r)?;
    }
    Ok(session)
}
