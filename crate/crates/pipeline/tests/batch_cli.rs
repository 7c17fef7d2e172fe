use std::path::Path;
use std::process::Command;

use setpath_core::classify::TacticLabel;
use setpath_core::config::{EngineConfig, InitialPositions};
use setpath_core::simulate::{
    evaluate, generate_match, load_dataset, reference_config, write_dataset, NoiseConfig, Simulator, TemplateSet,
};
use setpath_core::track::FilterMode;
use setpath_pipeline::{process_batch, BatchReport};

fn config() -> EngineConfig {
    let mut cfg = reference_config();
    cfg.initial_positions = vec![InitialPositions { pos_a: 2, pos_b: 6 }];
    cfg
}

fn write_match(dir: &Path, count: usize, seed: u64) {
    let cfg = config();
    let set = TemplateSet::default();
    let sim = Simulator::new(cfg.net_calibration().unwrap(), 1280.0, set.motion);
    let noise = NoiseConfig {
        jitter_sigma: 1.0,
        dropout_rate: 0.05,
        clutter_rate: 0.5,
        tail_fp_count: 3,
        seed: 0,
    };
    let rounds = generate_match(&sim, &set, &noise, count, seed, cfg.initial_positions[0]).unwrap();
    write_dataset(dir, &rounds, &cfg, seed).unwrap();
}

#[test]
fn batch_agrees_with_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    write_match(dir.path(), 50, 21);
    let ds = load_dataset(dir.path()).unwrap();
    for mode in [FilterMode::Plus, FilterMode::Baseline] {
        let report = process_batch(dir.path(), &ds.config, mode).unwrap();
        let eval = evaluate(&ds.rounds, mode, &ds.config).unwrap();
        assert!(report.success() && report.warnings.is_empty());
        assert_eq!(report.rounds.len(), 50);
        assert_eq!(report.stats.rounds_total, eval.total as u64);
        assert_eq!(report.stats.no_set, eval.no_set as u64);
        // Batch derives rotation from the file keys; evaluate takes it from
        // the ground truth. Same labels means the two agree.
        for (b, e) in report.rounds.iter().zip(&eval.predictions) {
            assert_eq!(b.result.round_key, e.round_key);
            assert_eq!(b.result.label, e.predicted, "{mode} {}", e.round_key);
        }
        let correct = report
            .rounds
            .iter()
            .zip(&ds.manifest.rounds)
            .filter(|(b, m)| b.result.label.label() == Some(m.truth))
            .count();
        assert_eq!(correct, eval.correct);
    }
}

fn setpath(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_setpath"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

#[test]
fn cli_simulate_batch_evaluate() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("match");
    let data_s = data.to_str().unwrap();
    let out = setpath(&["simulate", "--count", "24", "--seed", "9", "--out", data_s]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report_path = root.path().join("batch.json");
    let cfg_path = data.join("config.toml");
    let out = setpath(&[
        "batch",
        "--in",
        data_s,
        "--config",
        cfg_path.to_str().unwrap(),
        "--mode",
        "plus",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: BatchReport = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.rounds.len(), 24);

    let eval_path = root.path().join("eval.json");
    let out = setpath(&[
        "evaluate",
        "--dataset",
        data_s,
        "--mode",
        "plus",
        "--report",
        eval_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eval: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&eval_path).unwrap()).unwrap();
    assert_eq!(eval["total"], 24);
    // Noise-free match: every round is its own tactic.
    assert_eq!(eval["correct"], 24);
    let quick = report.stats.team_a.counts[&TacticLabel::Quick] + report.stats.team_b.counts[&TacticLabel::Quick];
    let truth_quick = load_dataset(&data)
        .unwrap()
        .manifest
        .rounds
        .iter()
        .filter(|r| r.truth == TacticLabel::Quick)
        .count();
    assert_eq!(quick as usize, truth_quick);
}

#[test]
fn cli_batch_fails_on_bad_stream() {
    let root = tempfile::tempdir().unwrap();
    std::fs::write(root.path().join("1_1_a.ndjson"), "garbage\n").unwrap();
    let cfg_path = root.path().join("engine.toml");
    std::fs::write(&cfg_path, config().to_toml_string().unwrap()).unwrap();
    let out = setpath(&[
        "batch",
        "--in",
        root.path().to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        root.path().join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_detect_on_rendered_frames() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("ds");
    let data_s = data.to_str().unwrap();
    let out = setpath(&[
        "simulate",
        "--count",
        "1",
        "--seed",
        "3",
        "--out",
        data_s,
        "--render-frames",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ds = load_dataset(&data).unwrap();
    let key = ds.manifest.rounds[0].round_key.to_string();
    let frames = data.join("frames").join(&key);
    let stream = root.path().join(format!("{key}.ndjson"));
    let out = setpath(&[
        "detect",
        "--video-frames",
        frames.to_str().unwrap(),
        "--config",
        data.join("config.toml").to_str().unwrap(),
        "--out",
        stream.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Classify the detector output through batch.
    let batch_dir = root.path().join("batch");
    std::fs::create_dir(&batch_dir).unwrap();
    std::fs::rename(&stream, batch_dir.join(format!("{key}.ndjson"))).unwrap();
    let report = process_batch(&batch_dir, &ds.config, FilterMode::Plus).unwrap();
    assert_eq!(report.rounds.len(), 1);
    assert_eq!(report.rounds[0].result.label.label(), Some(ds.manifest.rounds[0].truth));
}

#[test]
fn sample_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let engine = EngineConfig::load(&dir.join("engine.toml")).unwrap();
    assert_eq!(engine, config_with_positions(2, 5));
    assert_eq!(
        TemplateSet::load(&dir.join("templates.toml")).unwrap(),
        TemplateSet::default()
    );
    let noise = NoiseConfig::load(&dir.join("noise.toml")).unwrap();
    assert_eq!(noise.tail_fp_count, 3);
}

fn config_with_positions(pos_a: u8, pos_b: u8) -> EngineConfig {
    let mut cfg = reference_config();
    cfg.initial_positions = vec![InitialPositions { pos_a, pos_b }];
    cfg
}
