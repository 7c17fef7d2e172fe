//! Acceptance suite. Each criterion runs against an oracle written here,
//! independent of the library code, and prints one PASS/FAIL line.
//! Exits non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use setpath_core::analyze::Engine;
use setpath_core::classify::{classify, SetContext, TacticLabel, TrajectoryFeatures};
use setpath_core::config::InitialPositions;
use setpath_core::detect::{
    close, gaussian_blur, open, Candidate, DetectionRecord, Detector, DetectorConfig, Frame, Mask,
};
use setpath_core::geometry::{NetCalibration, Point2, TacticCoefficients};
use setpath_core::rotation::{rotation_check, RoundKey, Team};
use setpath_core::simulate::{
    evaluate, generate_benchmark, generate_match, reference_config, run_pipeline, FrameRenderer, MotionConfig,
    NoiseConfig, Simulator, TemplateSet,
};
use setpath_core::track::{
    evaluate_x_decrease, evaluate_x_increase, extract_setting_trajectory, update_status_baseline, BlobStatus,
    FilterMode, TrackerConfig, TrackerState, MIN_SET_LENGTH,
};
use setpath_pipeline::{RoundSubmission, SessionStore};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

// 1. Majority-trend rule against brute-force step counting.

fn c1_majority_trend() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let seqs: Vec<Vec<Point2>> = (0..10_000)
        .map(|_| {
            let n = rng.random_range(2..=50);
            // Small integer range so ties and repeated x values are common.
            (0..n)
                .map(|_| pt(rng.random_range(0..8) as f64, rng.random_range(0..8) as f64))
                .collect()
        })
        .collect();
    let start = Instant::now();
    let mut mismatches = 0;
    for s in &seqs {
        let mut dec = 0;
        let mut inc = 0;
        for i in 1..s.len() {
            if s[i].x < s[i - 1].x {
                dec += 1;
            }
            if s[i].x > s[i - 1].x {
                inc += 1;
            }
        }
        let steps = (s.len() - 1) as f64;
        if evaluate_x_decrease(s) != (dec as f64 > steps / 2.0) || evaluate_x_increase(s) != (inc as f64 > steps / 2.0)
        {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    check(
        mismatches == 0 && within(t, 5.0),
        format!(
            "10000 sequences, {mismatches} mismatches, {:.3} s (limit 5 s)",
            t.as_secs_f64()
        ),
    )
}

// 2. Baseline three-point rule against a direct transcription.

fn c2_baseline_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let blobs: Vec<Vec<Point2>> = (0..1000)
        .map(|_| {
            let n = rng.random_range(1..=10);
            let mut p = pt(rng.random_range(0..1280) as f64, rng.random_range(0..720) as f64);
            let mut v = vec![p];
            for _ in 1..n {
                // Steps around the 5 px still threshold, including exact 3-4-5.
                let (dx, dy) = match rng.random_range(0..4) {
                    0 => (3.0, 4.0),
                    1 => (rng.random_range(-2..=2) as f64, rng.random_range(-2..=2) as f64),
                    _ => (rng.random_range(-9..=9) as f64, rng.random_range(-9..=9) as f64),
                };
                let flip = if rng.random::<bool>() { -1.0 } else { 1.0 };
                p = pt(p.x + flip * dx, p.y + dy);
                v.push(p);
            }
            v
        })
        .collect();
    let start = Instant::now();
    let mut mismatches = 0;
    for b in &blobs {
        let expected = if b.len() < 3 {
            BlobStatus::Still
        } else {
            let (a, m, z) = (b[b.len() - 3], b[b.len() - 2], b[b.len() - 1]);
            let step = ((z.x - m.x).powi(2) + (z.y - m.y).powi(2)).sqrt();
            let same_x = (z.x - m.x > 0.0 && m.x - a.x > 0.0) || (z.x - m.x < 0.0 && m.x - a.x < 0.0);
            let same_y = (z.y - m.y > 0.0 && m.y - a.y > 0.0) || (z.y - m.y < 0.0 && m.y - a.y < 0.0);
            if step >= 5.0 && same_x && same_y {
                BlobStatus::DirectedMoving
            } else {
                BlobStatus::Still
            }
        };
        if update_status_baseline(b, 5.0) != expected {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    check(
        mismatches == 0 && within(t, 2.0),
        format!(
            "1000 blobs, {mismatches} mismatches, {:.3} s (limit 2 s)",
            t.as_secs_f64()
        ),
    )
}

// 3. A clean set with three reversed tail false positives.

fn c3_tail_false_positives() -> Outcome {
    let mut pts: Vec<Point2> = (0..15)
        .map(|i| pt(400.0 + 22.0 * i as f64, 200.0 + 20.0 * i as f64 - 1.2 * (i * i) as f64))
        .collect();
    let last = *pts.last().unwrap();
    for j in 1..=3 {
        pts.push(pt(
            last.x - 8.0 * j as f64,
            last.y + if j % 2 == 1 { 6.0 } else { -6.0 },
        ));
    }
    let records: Vec<DetectionRecord> = pts
        .iter()
        .enumerate()
        .map(|(i, &p)| DetectionRecord {
            frame_index: i as u64,
            candidates: vec![Candidate {
                position: p,
                area: 80.0,
                circularity: 0.9,
                score: 0.9,
            }],
        })
        .collect();
    let run = |mode| {
        let mut st = TrackerState::new(TrackerConfig::for_frame_width(1280.0), mode);
        for r in &records {
            st.associate(r).unwrap();
        }
        let blobs: Vec<_> = st.all_blobs().into_iter().cloned().collect();
        (blobs, st.harvest_trajectories())
    };
    let (plus_blobs, plus_harvest) = run(FilterMode::Plus);
    let (base_blobs, base_harvest) = run(FilterMode::Baseline);
    let plus_set = extract_setting_trajectory(&plus_harvest, MIN_SET_LENGTH);
    let ok = plus_blobs.len() == 1
        && base_blobs.len() == 1
        && plus_blobs[0].pts.len() == 18
        && plus_blobs[0].status == BlobStatus::DirectedMoving
        && plus_set.len() == 18
        && base_blobs[0].status == BlobStatus::Still
        && base_harvest.is_empty();
    check(
        ok,
        format!(
            "plus: {:?}, {} points harvested; baseline: {:?}, {} harvested",
            plus_blobs.first().map(|b| b.status),
            plus_set.len(),
            base_blobs.first().map(|b| b.status),
            base_harvest.len()
        ),
    )
}

// 4. Back-row flags against a six-player rotation simulation.

/// Players 0..6 by position slot; player 0 is the opposite.
struct Court {
    slots: [u8; 6],
}

impl Court {
    fn new(opposite_pos: u8) -> Self {
        let mut slots = [0u8; 6];
        for (k, s) in slots.iter_mut().enumerate() {
            // Player 0 at `opposite_pos`, others filled in court order.
            *s = ((k as i32 - (opposite_pos as i32 - 1)).rem_euclid(6)) as u8;
        }
        Court { slots }
    }

    /// The player in position 2 moves to position 1, and so on around.
    fn rotate(&mut self) {
        self.slots.rotate_left(1);
    }

    fn opposite_back_row(&self) -> bool {
        let pos = self.slots.iter().position(|&p| p == 0).unwrap() + 1;
        pos == 1 || pos == 5 || pos == 6
    }
}

fn c4_rotation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    let mut mismatches = 0;
    let mut rounds_total = 0;
    for _ in 0..500 {
        let (pa, pb) = (rng.random_range(1..=6u8), rng.random_range(1..=6u8));
        let (mut ca, mut cb) = (Court::new(pa), Court::new(pb));
        let mut receiving = if rng.random::<bool>() { Team::A } else { Team::B };
        let mut keys = Vec::new();
        let mut expected_a = Vec::new();
        let mut expected_b = Vec::new();
        for rally in 1..=rng.random_range(1..=100u32) {
            for r in 1..=rng.random_range(1..=3u32) {
                keys.push(RoundKey::new(rally, r, receiving));
                expected_a.push(ca.opposite_back_row());
                expected_b.push(cb.opposite_back_row());
            }
            if rng.random::<bool>() {
                // Side-out: the receiving team wins the rally, rotates and serves.
                match receiving {
                    Team::A => ca.rotate(),
                    Team::B => cb.rotate(),
                }
                receiving = receiving.other();
            }
        }
        rounds_total += keys.len();
        let flags = rotation_check(pa, pb, &keys).unwrap();
        if flags.back_row_a != expected_a || flags.back_row_b != expected_b {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    check(
        mismatches == 0 && within(t, 10.0),
        format!(
            "500 scripts ({rounds_total} rounds), {mismatches} mismatched scripts, {:.3} s (limit 10 s)",
            t.as_secs_f64()
        ),
    )
}

// 5. Tactic rule chain against a literal transcription.

#[allow(clippy::too_many_arguments)]
fn rules_literal(
    sp: f64,
    hp: f64,
    hya: f64,
    nw: f64,
    lnx: f64,
    rnx: f64,
    coef: &TacticCoefficients,
    team_a: bool,
    bra: bool,
    brb: bool,
) -> &'static str {
    let p = |k: f64| lnx + k * (rnx - lnx) / 5.0;
    let (p1, p2, p3, p4) = (p(1.0), p(2.0), p(3.0), p(4.0));
    // Team A attacks the other way: reflect about the net midline.
    let (sp, hp, br) = if team_a {
        (lnx + rnx - sp, lnx + rnx - hp, bra)
    } else {
        (sp, hp, brb)
    };
    let xd = hp - sp;
    let w = rnx - lnx;
    if xd > 0.0 && xd <= w / 5.0 && hya > coef.q * nw {
        return "quick";
    }
    if xd > w / 2.0 && xd <= 1.5 * w && hp > 1.5 * p1 && hp < p4 && hya > coef.m * nw {
        return "thirty_one";
    }
    if xd < 0.0 && -xd <= w / 3.0 && hya > coef.q * nw {
        return "back_one";
    }
    if p1 < sp && sp < p3 && p3 < hp && hp < p4 && hya > coef.s * nw {
        return "short";
    }
    if hp > (p3 + p4) / 2.0 {
        return "outside";
    }
    if (p1 + p2) / 2.0 < hp && hp < (p3 + p4) / 2.0 && hya < coef.c * nw {
        return "bic";
    }
    if hp < (p1 + p2) / 2.0 {
        return if br { "d_ball" } else { "oppo" };
    }
    "unknown"
}

fn c5_rule_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..10_000 {
        // Integer net ends with a span divisible by 10, so every section
        // boundary and midpoint is exact and boundary ties are meaningful.
        let lnx = rng.random_range(0..400) as f64;
        let rnx = lnx + 10.0 * rng.random_range(20..100) as f64;
        let lny = rng.random_range(50..300) as f64;
        let uny = lny + rng.random_range(40..200) as f64;
        let cal = NetCalibration::new(lnx, rnx, uny, lny, 1000.0).unwrap();
        let nw = uny - lny;
        let w = rnx - lnx;
        let coef = if i % 4 == 0 {
            TacticCoefficients {
                q: rng.random_range(0.5..2.0),
                m: rng.random_range(0.5..2.5),
                s: rng.random_range(0.5..2.0),
                c: rng.random_range(0.3..1.5),
            }
        } else {
            TacticCoefficients::default()
        };
        let marks = [
            lnx,
            lnx + w / 5.0,
            lnx + 3.0 * w / 10.0,
            lnx + 2.0 * w / 5.0,
            lnx + 3.0 * w / 5.0,
            lnx + 7.0 * w / 10.0,
            lnx + 4.0 * w / 5.0,
            rnx,
        ];
        let mut x = || {
            if rng.random_range(0..4) == 0 {
                marks[rng.random_range(0..marks.len())]
            } else {
                rng.random_range(lnx - 0.2 * w..rnx + 0.2 * w)
            }
        };
        let sp = x();
        let hp = x();
        let hya = if rng.random_range(0..5) == 0 {
            [coef.q, coef.m, coef.s, coef.c][rng.random_range(0..4)] * nw
        } else {
            rng.random_range(0.0..3.0 * nw)
        };
        let team_a = rng.random::<bool>();
        let (bra, brb) = (rng.random::<bool>(), rng.random::<bool>());
        let f = TrajectoryFeatures {
            sp,
            hp,
            hya,
            xd: hp - sp,
            nw,
            setter_height: 0.0,
            hitter_height: 0.0,
        };
        let ctx = SetContext::new(if team_a { Team::A } else { Team::B }, bra, brb);
        let got = classify(&f, &cal.sections().unwrap(), &coef, &ctx, &cal);
        let want = rules_literal(sp, hp, hya, nw, lnx, rnx, &coef, team_a, bra, brb);
        seen.insert(want);
        if got.as_str() != want && mismatches.len() < 5 {
            mismatches.push(format!("{sp},{hp},{hya} -> {got} vs {want}"));
        }
    }
    let t = start.elapsed();
    check(
        mismatches.is_empty() && within(t, 5.0),
        format!(
            "10000 tuples, {} labels exercised, {} mismatches {:?}, {:.3} s (limit 5 s)",
            seen.len(),
            mismatches.len(),
            mismatches,
            t.as_secs_f64()
        ),
    )
}

// 6. Noise-free template rounds classify as their own tactic.

fn c6_template_consistency() -> Outcome {
    let cfg = reference_config();
    let set = TemplateSet::default();
    let sim = Simulator::new(cfg.net_calibration().unwrap(), 1280.0, set.motion);
    let noise = NoiseConfig::default();
    let mut ok = [0usize; 2];
    let mut total = 0;
    let mut wrong = Vec::new();
    for spec in &set.templates {
        let t = spec.resolve(&sim.calibration);
        for team in [Team::B, Team::A] {
            // D-ball and oppo share a path and split on the back-row flag.
            let back_row = match spec.label {
                TacticLabel::DBall => Some(true),
                TacticLabel::Oppo => Some(false),
                _ => None,
            };
            let round = sim.generate(&t, &noise, RoundKey::new(1, 1, team), back_row).unwrap();
            total += 1;
            for (k, mode) in [FilterMode::Plus, FilterMode::Baseline].into_iter().enumerate() {
                let p = run_pipeline(&round, mode, &cfg).unwrap();
                if p.label() == Some(spec.label) {
                    ok[k] += 1;
                } else {
                    wrong.push(format!("{} {team} {mode}: {p}", spec.label));
                }
            }
        }
    }
    check(
        total == 16 && ok == [16, 16],
        format!("plus {}/{total}, baseline {}/{total} {wrong:?}", ok[0], ok[1]),
    )
}

// 7. Benchmark with tail false positives and clutter.

fn c7_benchmark() -> Outcome {
    let start = Instant::now();
    let mut cfg = reference_config();
    cfg.initial_positions = vec![InitialPositions { pos_a: 2, pos_b: 5 }];
    let set = TemplateSet::default();
    let sim = Simulator::new(cfg.net_calibration().unwrap(), 1280.0, set.motion);
    let noise = NoiseConfig {
        tail_fp_count: 3,
        clutter_rate: 0.5,
        ..NoiseConfig::default()
    };
    let rounds = generate_benchmark(&sim, &set, &noise, 100, 7).unwrap();
    let plus = evaluate(&rounds, FilterMode::Plus, &cfg).unwrap();
    let base = evaluate(&rounds, FilterMode::Baseline, &cfg).unwrap();
    let t = start.elapsed();
    let gain = 100.0 * (plus.accuracy - base.accuracy);
    check(
        rounds.len() == 800 && gain >= 3.0 && within(t, 60.0),
        format!(
            "{} rounds, plus {:.2}%, baseline {:.2}%, gain {gain:.2} points (need >= 3), {:.2} s (limit 60 s)",
            rounds.len(),
            100.0 * plus.accuracy,
            100.0 * base.accuracy,
            t.as_secs_f64()
        ),
    )
}

// 8. Latency: one submitted round, and detection over rendered frames.

fn c8_latency() -> Outcome {
    const FRAMES: u64 = 152;
    let mut cfg = reference_config();
    cfg.initial_positions = vec![InitialPositions { pos_a: 2, pos_b: 5 }];
    let set = TemplateSet::default();
    let cal = cfg.net_calibration().unwrap();
    let noise = NoiseConfig {
        jitter_sigma: 1.0,
        clutter_rate: 0.5,
        tail_fp_count: 3,
        seed: 8,
        ..NoiseConfig::default()
    };
    let t = set.get(TacticLabel::Outside).unwrap().resolve(&cal);
    let key = RoundKey::new(1, 1, Team::B);
    // Pad the lead-in so the clip spans exactly 152 frames.
    let probe = Simulator::new(
        cal,
        1280.0,
        MotionConfig {
            lead_in_frames: 0,
            ..set.motion
        },
    )
    .generate(&t, &noise, key, None)
    .unwrap();
    let span = probe.records.last().unwrap().frame_index + 1;
    let motion = MotionConfig {
        lead_in_frames: (FRAMES - span) as u32,
        ..set.motion
    };
    let round = Simulator::new(cal, 1280.0, motion)
        .generate(&t, &noise, key, None)
        .unwrap();
    let last = round.records.last().unwrap().frame_index + 1;

    let dir = tempfile::tempdir().unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let id = store.create_session(None, cfg.clone()).unwrap().id.clone();
    let mut times = Vec::with_capacity(100);
    for i in 0..100u32 {
        let start = Instant::now();
        store
            .submit_round(
                &id,
                RoundSubmission {
                    key: RoundKey::new(i + 1, 1, Team::B),
                    receiving: None,
                    records: round.records.clone(),
                },
            )
            .unwrap();
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    let median_ms = 1e3 * (times[49] + times[50]) / 2.0;

    // Full frame path: render, detect, track, classify.
    let start = Instant::now();
    let renderer = FrameRenderer::new(1280, 720, 8);
    let mut detector = Detector::new(DetectorConfig::for_frame(1280, 720)).unwrap();
    let mut detected = Vec::new();
    for frame in renderer.render_round(&round.records, set.motion.fps) {
        let r = detector.process(&frame).unwrap();
        if !r.candidates.is_empty() {
            detected.push(r);
        }
    }
    let frames_done = detected.len();
    let engine = Engine::from_config(&cfg).unwrap();
    let analysis = engine.analyze(&detected, &round.context()).unwrap();
    let full = start.elapsed().as_secs_f64();

    check(
        last == FRAMES && median_ms < 500.0 && full < 16.83,
        format!(
            "{last}-frame round: submit median {median_ms:.2} ms (limit 500 ms); rendered+detected+classified in {full:.2} s (limit 16.83 s), {frames_done} frames with candidates, label {}",
            analysis.prediction
        ),
    )
}

// 9. Blur mass conservation and morphology extensivity.

fn c9_preprocessing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for i in 0..30 {
        let (w, h) = (rng.random_range(16..120), rng.random_range(16..90));
        let pixels: Vec<f32> = (0..w * h)
            .map(|_| {
                if rng.random_range(0..10) == 0 {
                    255.0
                } else {
                    rng.random_range(0.0..80.0)
                }
            })
            .collect();
        let f = Frame::new(w, h, pixels, i, 0.0).unwrap();
        let sigma = [1.0, 2.0, 3.0][i as usize % 3];
        let b = gaussian_blur(&f, sigma).unwrap();
        let (s0, s1): (f64, f64) = (
            f.pixels.iter().map(|&v| v as f64).sum(),
            b.pixels.iter().map(|&v| v as f64).sum(),
        );
        worst = worst.max((s1 - s0).abs() / s0);
    }
    let mut violations = 0;
    for _ in 0..1000 {
        let (w, h) = (rng.random_range(1..40), rng.random_range(1..40));
        let density = rng.random_range(0.1..0.9);
        let mut m = Mask::empty(w, h);
        for y in 0..h {
            for x in 0..w {
                m.set(x, y, rng.random_bool(density));
            }
        }
        let r = rng.random_range(1..=3);
        let (o, c) = (open(&m, r), close(&m, r));
        for y in 0..h {
            for x in 0..w {
                if (o.get(x, y) && !m.get(x, y)) || (m.get(x, y) && !c.get(x, y)) {
                    violations += 1;
                }
            }
        }
    }
    check(
        worst <= 0.005 && violations == 0,
        format!(
            "blur worst mass change {:.4}% (limit 0.5%); 1000 masks, {violations} opening/closing violations",
            100.0 * worst
        ),
    )
}

// 10. Stats survive a restart bit for bit.

fn c10_persistence() -> Outcome {
    let mut cfg = reference_config();
    cfg.initial_positions = vec![InitialPositions { pos_a: 3, pos_b: 4 }];
    let set = TemplateSet::default();
    let sim = Simulator::new(cfg.net_calibration().unwrap(), 1280.0, set.motion);
    let noise = NoiseConfig {
        jitter_sigma: 1.0,
        clutter_rate: 0.3,
        tail_fp_count: 2,
        ..NoiseConfig::default()
    };
    let rounds = generate_match(&sim, &set, &noise, 50, 10, cfg.initial_positions[0]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (id, before, results_before) = {
        let store = SessionStore::open(dir.path()).unwrap();
        let id = store.create_session(None, cfg.clone()).unwrap().id.clone();
        for r in &rounds {
            store
                .submit_round(
                    &id,
                    RoundSubmission {
                        key: r.round_key,
                        receiving: None,
                        records: r.records.clone(),
                    },
                )
                .unwrap();
        }
        let s = store.get(&id).unwrap();
        (id, store.get_stats(&s.id).unwrap(), s.rounds())
        // Store dropped here with no shutdown step.
    };
    let store = SessionStore::open(dir.path()).unwrap();
    let after = store.get_stats(&id).unwrap();
    let results_after = store.get(&id).unwrap().rounds();
    let bits = |d: &setpath_pipeline::TacticDistribution| -> Vec<u64> {
        [&d.team_a, &d.team_b]
            .iter()
            .flat_map(|t| t.fractions.values().map(|f| f.to_bits()))
            .collect()
    };
    let same_json = serde_json::to_string(&before).unwrap() == serde_json::to_string(&after).unwrap();
    check(
        before.rounds_total == 50
            && before == after
            && bits(&before) == bits(&after)
            && same_json
            && results_before == results_after,
        format!(
            "{} rounds before restart, {} after; stats identical: {}",
            before.rounds_total,
            after.rounds_total,
            before == after && same_json
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("majority-trend rule matches step counting", c1_majority_trend),
        ("baseline rule matches three-point transcription", c2_baseline_rule),
        (
            "tail false positives: plus keeps, baseline drops",
            c3_tail_false_positives,
        ),
        ("back-row flags match six-player rotation", c4_rotation),
        ("tactic rules match literal transcription", c5_rule_chain),
        ("template self-consistency 16/16", c6_template_consistency),
        ("plus beats baseline by >= 3 points", c7_benchmark),
        ("latency budgets", c8_latency),
        ("blur conservation and morphology extensivity", c9_preprocessing),
        ("stats identical across restart", c10_persistence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
