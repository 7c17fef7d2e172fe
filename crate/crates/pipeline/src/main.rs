use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use setpath_core::config::{EngineConfig, InitialPositions};
use setpath_core::detect::stream::write_detections;
use setpath_core::simulate::{
    evaluate, generate_benchmark, generate_match, load_dataset, reference_config, write_dataset, FrameRenderer,
    NoiseConfig, Simulator, TemplateSet,
};
use setpath_core::track::FilterMode;
use setpath_pipeline::{api, frames, process_batch, SessionStore};

#[derive(Parser)]
#[command(
    name = "setpath",
    version,
    about = "Volleyball setting-tactic recognition from ball trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        data_dir: PathBuf,
    },
    /// Classify a directory of `score_round_team.ndjson` streams.
    Batch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "plus")]
        mode: FilterMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the detector over a directory of frame images.
    Detect {
        #[arg(long)]
        video_frames: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 24.0)]
        fps: f64,
    },
    /// Generate a labelled synthetic dataset.
    Simulate {
        /// Template file; built-in templates when absent.
        #[arg(long)]
        templates: Option<PathBuf>,
        /// Noise file; noise-free when absent.
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Engine config to generate against; the reference 1280x720
        /// calibration when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Independent rounds, `count` per tactic, instead of a scripted
        /// match.
        #[arg(long)]
        benchmark: bool,
        /// Also write rendered frames to `<out>/frames/<round>/`.
        #[arg(long)]
        render_frames: bool,
    },
    /// Score a dataset written by `simulate`.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "plus")]
        mode: FilterMode,
        #[arg(long)]
        report: PathBuf,
    },
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();

    match Cli::parse().command {
        Command::Serve { port, host, data_dir } => {
            let store = Arc::new(SessionStore::open(&data_dir)?);
            let addr: SocketAddr = format!("{host}:{port}").parse().context("bad host/port")?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr).await?;
                tracing::info!("listening on http://{}", listener.local_addr()?);
                api::serve(listener, store).await
            })?;
        }
        Command::Batch {
            input,
            config,
            mode,
            out,
        } => {
            let cfg = EngineConfig::load(&config)?;
            let report = process_batch(&input, &cfg, mode)?;
            write_json(&out, &report)?;
            eprintln!(
                "{} rounds, {} no-set, {} warnings, {} failures",
                report.rounds.len(),
                report.stats.no_set,
                report.warnings.len(),
                report.failures.len()
            );
            if !report.success() {
                std::process::exit(1);
            }
        }
        Command::Detect {
            video_frames,
            config,
            out,
            fps,
        } => {
            let cfg = EngineConfig::load(&config)?;
            let expected = (
                cfg.calibration.frame_width as usize,
                cfg.calibration.frame_height as usize,
            );
            let records = frames::detect_directory(&video_frames, cfg.detector_config(), Some(expected), fps)?;
            let mut w = BufWriter::new(File::create(&out)?);
            write_detections(&records, cfg.calibration.frame_height, &mut w)?;
            w.flush()?;
            eprintln!("{} frames", records.len());
        }
        Command::Simulate {
            templates,
            noise,
            count,
            seed,
            out,
            config,
            benchmark,
            render_frames,
        } => {
            let set = match templates {
                Some(p) => TemplateSet::load(&p)?,
                None => TemplateSet::default(),
            };
            let noise = match noise {
                Some(p) => NoiseConfig::load(&p)?,
                None => NoiseConfig::default(),
            };
            let mut cfg = match config {
                Some(p) => EngineConfig::load(&p)?,
                None => reference_config(),
            };
            if cfg.initial_positions.is_empty() {
                cfg.initial_positions.push(InitialPositions { pos_a: 2, pos_b: 5 });
            }
            let sim = Simulator::new(cfg.net_calibration()?, cfg.calibration.frame_width, set.motion);
            let rounds = if benchmark {
                generate_benchmark(&sim, &set, &noise, count, seed)?
            } else {
                generate_match(&sim, &set, &noise, count, seed, cfg.initial_positions[0])?
            };
            write_dataset(&out, &rounds, &cfg, seed)?;
            if render_frames {
                let renderer = FrameRenderer::new(
                    cfg.calibration.frame_width as usize,
                    cfg.calibration.frame_height as usize,
                    seed,
                );
                for r in &rounds {
                    let dir = out.join("frames").join(r.round_key.to_string());
                    std::fs::create_dir_all(&dir)?;
                    for frame in renderer.render_round(&r.records, set.motion.fps) {
                        frames::save_frame(&frame, &dir.join(format!("{:05}.png", frame.index)))?;
                    }
                }
            }
            eprintln!("{} rounds written to {}", rounds.len(), out.display());
        }
        Command::Evaluate { dataset, mode, report } => {
            let ds = load_dataset(&dataset)?;
            if ds.rounds.is_empty() {
                bail!("dataset {} has no rounds", dataset.display());
            }
            let r = evaluate(&ds.rounds, mode, &ds.config)?;
            write_json(&report, &r)?;
            eprintln!(
                "{mode}: {}/{} correct ({:.2}%), {} no-set",
                r.correct,
                r.total,
                100.0 * r.accuracy,
                r.no_set
            );
        }
    }
    Ok(())
}
