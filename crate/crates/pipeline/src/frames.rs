//! Image-file frames: decoding for the detector and PNG output of rendered
//! synthetic rounds.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use setpath_core::detect::{DetectionRecord, Detector, DetectorConfig, Frame};

const EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// Image files in `dir`, sorted by name.
pub fn frame_paths(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Decode to grey levels. Colour inputs are converted here.
pub fn load_frame(path: &Path, index: u64, fps: f64) -> anyhow::Result<Frame> {
    let img = image::open(path)
        .with_context(|| format!("decoding {}", path.display()))?
        .to_luma8();
    let (w, h) = img.dimensions();
    Ok(Frame::from_gray8(
        w as usize,
        h as usize,
        img.as_raw(),
        index,
        index as f64 / fps,
    )?)
}

pub fn save_frame(frame: &Frame, path: &Path) -> anyhow::Result<()> {
    let data: Vec<u8> = frame
        .pixels
        .iter()
        .map(|&v| v.round().clamp(0.0, 255.0) as u8)
        .collect();
    image::GrayImage::from_raw(frame.width as u32, frame.height as u32, data)
        .context("frame buffer size")?
        .save(path)
        .with_context(|| format!("writing {}", path.display()))
}

/// Run the detector over every frame in `dir`. Frames must share one size,
/// matching `expected` when given.
pub fn detect_directory(
    dir: &Path,
    config: DetectorConfig,
    expected: Option<(usize, usize)>,
    fps: f64,
) -> anyhow::Result<Vec<DetectionRecord>> {
    let mut detector = Detector::new(config)?;
    let mut out = Vec::new();
    let mut size = expected;
    for (i, path) in frame_paths(dir)?.iter().enumerate() {
        let frame = load_frame(path, i as u64, fps)?;
        match size {
            Some((w, h)) if (w, h) != (frame.width, frame.height) => bail!(
                "{} is {}x{}, expected {w}x{h}",
                path.display(),
                frame.width,
                frame.height
            ),
            _ => size = Some((frame.width, frame.height)),
        }
        out.push(detector.process(&frame)?);
    }
    Ok(out)
}
