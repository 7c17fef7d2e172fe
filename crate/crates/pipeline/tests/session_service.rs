use std::collections::BTreeMap;
use std::sync::Arc;

use setpath_core::classify::{Prediction, TacticLabel};
use setpath_core::config::{EngineConfig, InitialPositions};
use setpath_core::detect::{Candidate, DetectionRecord};
use setpath_core::geometry::Point2;
use setpath_core::rotation::{RoundKey, Team};
use setpath_core::simulate::{generate_match, reference_config, NoiseConfig, Simulator, TemplateSet};
use setpath_pipeline::{RoundResult, RoundSubmission, SessionStore};

fn config() -> EngineConfig {
    let mut cfg = reference_config();
    cfg.initial_positions = vec![InitialPositions { pos_a: 1, pos_b: 4 }];
    cfg
}

fn simulator() -> (Simulator, TemplateSet) {
    let set = TemplateSet::default();
    (
        Simulator::new(config().net_calibration().unwrap(), 1280.0, set.motion),
        set,
    )
}

fn clean_round(label: TacticLabel, key: RoundKey) -> Vec<DetectionRecord> {
    let (sim, set) = simulator();
    let t = set.get(label).unwrap().resolve(&sim.calibration);
    sim.generate(&t, &NoiseConfig::default(), key, None).unwrap().records
}

fn short_track(frames: u64) -> Vec<DetectionRecord> {
    (0..frames)
        .map(|i| DetectionRecord {
            frame_index: i,
            candidates: vec![Candidate {
                position: Point2::new(500.0 + 15.0 * i as f64, 300.0 + 10.0 * i as f64),
                area: 80.0,
                circularity: 0.9,
                score: 0.9,
            }],
        })
        .collect()
}

fn sub(key: RoundKey, records: Vec<DetectionRecord>) -> RoundSubmission {
    RoundSubmission {
        key,
        receiving: None,
        records,
    }
}

#[test]
fn clean_quick_round_is_quick() {
    let store = SessionStore::in_memory();
    let s = store.create_session(None, config()).unwrap();
    for team in [Team::B, Team::A] {
        let key = RoundKey::new(if team == Team::B { 1 } else { 2 }, 1, team);
        let r = s.submit(sub(key, clean_round(TacticLabel::Quick, key))).unwrap();
        assert_eq!(r.label, Prediction::Tactic(TacticLabel::Quick), "{team}");
        assert!(r.processing_ms >= 0.0);
        assert!(r.trajectory_points >= 9);
    }
}

#[test]
fn four_point_track_is_no_set() {
    let store = SessionStore::in_memory();
    let s = store.create_session(None, config()).unwrap();
    let r = s.submit(sub(RoundKey::new(1, 1, Team::B), short_track(4))).unwrap();
    assert_eq!(r.label, Prediction::NoSet);
    assert!(r.features.is_none());
    assert_eq!(r.trajectory_points, 0);
}

#[test]
fn stats_counting_example() {
    let store = SessionStore::in_memory();
    let s = store.create_session(None, config()).unwrap();
    let labels = [
        Some(TacticLabel::Quick),
        Some(TacticLabel::Quick),
        Some(TacticLabel::Outside),
        None,
    ];
    for (i, l) in labels.iter().enumerate() {
        let key = RoundKey::new(i as u32 + 1, 1, Team::B);
        let records = match l {
            Some(l) => clean_round(*l, key),
            None => short_track(4),
        };
        s.submit(sub(key, records)).unwrap();
    }
    let st = s.stats();
    assert_eq!(st.rounds_total, 4);
    assert_eq!(st.no_set, 1);
    let b = &st.team_b;
    assert_eq!(b.counts[&TacticLabel::Quick], 2);
    assert_eq!(b.counts[&TacticLabel::Outside], 1);
    assert_eq!(b.no_set, 1);
    assert_eq!(b.fractions[&TacticLabel::Quick], 2.0 / 3.0);
    assert_eq!(b.fractions[&TacticLabel::Outside], 1.0 / 3.0);
    assert_eq!(st.team_a.labeled, 0);
}

fn submit_match(store: &SessionStore, id: &str, count: usize, seed: u64) {
    let (sim, set) = simulator();
    let noise = NoiseConfig {
        jitter_sigma: 1.5,
        dropout_rate: 0.05,
        clutter_rate: 0.5,
        tail_fp_count: 3,
        seed: 0,
    };
    for r in generate_match(&sim, &set, &noise, count, seed, config().initial_positions[0]).unwrap() {
        store.submit_round(id, sub(r.round_key, r.records)).unwrap();
    }
}

#[test]
fn stats_match_recount_of_log() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let id = store
        .create_session(Some("recount".into()), config())
        .unwrap()
        .id
        .clone();
    submit_match(&store, &id, 60, 3);

    let log = std::fs::read_to_string(dir.path().join(&id).join("rounds.ndjson")).unwrap();
    let results: Vec<RoundResult> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(results.len(), 60);
    let mut counts: BTreeMap<(Team, Option<TacticLabel>), u64> = BTreeMap::new();
    for r in &results {
        *counts.entry((r.possessing_team, r.label.label())).or_default() += 1;
    }
    let st = store.get_stats(&id).unwrap();
    assert_eq!(st.rounds_total, 60);
    for team in [Team::A, Team::B] {
        let d = st.team(team);
        let labeled: u64 = counts
            .iter()
            .filter(|((t, l), _)| *t == team && l.is_some())
            .map(|(_, n)| n)
            .sum();
        assert_eq!(d.labeled, labeled);
        assert_eq!(d.no_set, counts.get(&(team, None)).copied().unwrap_or(0));
        for l in TacticLabel::ALL {
            let n = counts.get(&(team, Some(l))).copied().unwrap_or(0);
            assert_eq!(d.counts[&l], n, "{team} {l}");
            if labeled > 0 {
                assert!((d.fractions[&l] - n as f64 / labeled as f64).abs() < 1e-12);
            }
        }
        if labeled > 0 {
            let sum: f64 = d.fractions.values().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }
    assert_eq!(
        st.no_set,
        counts
            .iter()
            .filter(|((_, l), _)| l.is_none())
            .map(|(_, n)| n)
            .sum::<u64>()
    );
}

#[test]
fn d_ball_and_oppo_agree_with_flags() {
    let store = SessionStore::in_memory();
    let id = store.create_session(None, config()).unwrap().id.clone();
    submit_match(&store, &id, 120, 11);
    let rounds = store.get(&id).unwrap().rounds();
    let mut seen = 0;
    for r in &rounds {
        let flag = match r.possessing_team {
            Team::A => r.back_row_a,
            Team::B => r.back_row_b,
        };
        match r.label {
            Prediction::Tactic(TacticLabel::DBall) => {
                assert!(flag, "{}", r.round_key);
                seen += 1;
            }
            Prediction::Tactic(TacticLabel::Oppo) => {
                assert!(!flag, "{}", r.round_key);
                seen += 1;
            }
            _ => {}
        }
    }
    assert!(seen > 0);
}

#[test]
fn duplicate_leaves_log_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let id = store.create_session(None, config()).unwrap().id.clone();
    let key = RoundKey::new(1, 1, Team::B);
    store
        .submit_round(&id, sub(key, clean_round(TacticLabel::Bic, key)))
        .unwrap();
    let log = dir.path().join(&id).join("rounds.ndjson");
    let before = std::fs::read(&log).unwrap();
    assert!(store
        .submit_round(&id, sub(key, clean_round(TacticLabel::Bic, key)))
        .is_err());
    assert_eq!(std::fs::read(&log).unwrap(), before);
    assert_eq!(store.get_stats(&id).unwrap().rounds_total, 1);
}

#[test]
fn created_session_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let id = {
        let store = SessionStore::open(dir.path()).unwrap();
        store.create_session(None, config()).unwrap().id.clone()
    };
    let store = SessionStore::open(dir.path()).unwrap();
    let s = store.get(&id).unwrap();
    assert_eq!(s.rounds_total(), 0);
    assert_eq!(s.config, config());
}

#[test]
fn stats_snapshots_are_consistent_under_submission() {
    let store = Arc::new(SessionStore::in_memory());
    let id = store.create_session(None, config()).unwrap().id.clone();
    let other = store.create_session(None, config()).unwrap().id.clone();
    let reader = {
        let (store, id) = (store.clone(), id.clone());
        std::thread::spawn(move || {
            let mut last = 0;
            for _ in 0..2000 {
                let st = store.get_stats(&id).unwrap();
                let per_team = st.team_a.labeled + st.team_a.no_set + st.team_b.labeled + st.team_b.no_set;
                assert_eq!(per_team, st.rounds_total);
                assert_eq!(st.no_set, st.team_a.no_set + st.team_b.no_set);
                assert!(st.rounds_total >= last);
                last = st.rounds_total;
            }
        })
    };
    let writer = {
        let (store, other) = (store.clone(), other.clone());
        std::thread::spawn(move || submit_match(&store, &other, 40, 5))
    };
    submit_match(&store, &id, 40, 4);
    reader.join().unwrap();
    writer.join().unwrap();
    assert_eq!(store.get_stats(&id).unwrap().rounds_total, 40);
    assert_eq!(store.get_stats(&other).unwrap().rounds_total, 40);
}
