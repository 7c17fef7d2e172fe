use super::{Frame, Mask};
use crate::error::{Error, Result};

/// Running-average background: `mean <- (1 - lr) * mean + lr * frame`.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundModel {
    pub width: usize,
    pub height: usize,
    pub mean: Vec<f32>,
    pub learning_rate: f32,
    pub threshold: f32,
}

impl BackgroundModel {
    pub fn from_frame(frame: &Frame, learning_rate: f32, threshold: f32) -> Self {
        Self {
            width: frame.width,
            height: frame.height,
            mean: frame.pixels.clone(),
            learning_rate,
            threshold,
        }
    }

    pub fn uniform(width: usize, height: usize, value: f32, learning_rate: f32, threshold: f32) -> Self {
        Self {
            width,
            height,
            mean: vec![value; width * height],
            learning_rate,
            threshold,
        }
    }
}

/// Foreground where `|frame - mean| > threshold`, then blend the frame into
/// the mean. The mask is computed against the model *before* the update.
pub fn background_subtract(frame: &Frame, mut model: BackgroundModel) -> Result<(Mask, BackgroundModel)> {
    if frame.width != model.width || frame.height != model.height {
        return Err(Error::DimensionMismatch {
            expected_w: model.width,
            expected_h: model.height,
            got_w: frame.width,
            got_h: frame.height,
        });
    }
    let lr = model.learning_rate;
    let thr = model.threshold;
    let mut mask = Mask::empty(frame.width, frame.height);
    for ((m, &p), fg) in model.mean.iter_mut().zip(&frame.pixels).zip(mask.data.iter_mut()) {
        *fg = (p - *m).abs() > thr;
        *m = (1.0 - lr) * *m + lr * p;
    }
    Ok((mask, model))
}
