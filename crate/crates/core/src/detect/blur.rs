use super::Frame;
use crate::error::{Error, Result};

/// Sampled 1-D Gaussian truncated at `ceil(3 sigma)` and renormalized to
/// sum to one. The outer product of two of these is the truncated 2-D
/// kernel `exp(-(x^2 + y^2) / 2 sigma^2) / (2 pi sigma^2)` renormalized.
pub fn gaussian_kernel_1d(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-radius..=radius).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Half-sample symmetric reflection: `-1 -> 0`, `-2 -> 1`, `n -> n - 1`.
/// Works for any offset, including kernels wider than the signal.
#[inline]
fn reflect(i: i64, n: i64) -> usize {
    let period = 2 * n;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

fn convolve_rows(src: &[f32], width: usize, height: usize, kernel: &[f64], out: &mut [f32]) {
    let r = (kernel.len() / 2) as i64;
    let w = width as i64;
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        let dst = &mut out[y * width..(y + 1) * width];
        for (x, d) in dst.iter_mut().enumerate() {
            let xi = x as i64;
            let mut acc = 0.0f64;
            if xi >= r && xi + r < w {
                let base = (xi - r) as usize;
                for (k, &kv) in kernel.iter().enumerate() {
                    acc += kv * row[base + k] as f64;
                }
            } else {
                for (k, &kv) in kernel.iter().enumerate() {
                    acc += kv * row[reflect(xi + k as i64 - r, w)] as f64;
                }
            }
            *d = acc as f32;
        }
    }
}

fn convolve_cols(src: &[f32], width: usize, height: usize, kernel: &[f64], out: &mut [f32]) {
    let r = (kernel.len() / 2) as i64;
    let h = height as i64;
    let mut acc = vec![0.0f64; width];
    for y in 0..height {
        acc.iter_mut().for_each(|v| *v = 0.0);
        let yi = y as i64;
        for (k, &kv) in kernel.iter().enumerate() {
            let sy = reflect(yi + k as i64 - r, h);
            let row = &src[sy * width..(sy + 1) * width];
            for (a, &p) in acc.iter_mut().zip(row) {
                *a += kv * p as f64;
            }
        }
        for (d, &a) in out[y * width..(y + 1) * width].iter_mut().zip(&acc) {
            *d = a as f32;
        }
    }
}

/// Separable Gaussian blur with symmetric border reflection, which keeps
/// the total intensity unchanged up to rounding.
pub fn gaussian_blur(frame: &Frame, sigma: f64) -> Result<Frame> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let kernel = gaussian_kernel_1d(sigma);
    let (w, h) = (frame.width, frame.height);
    let mut tmp = vec![0.0f32; w * h];
    let mut out = vec![0.0f32; w * h];
    if w > 0 && h > 0 {
        convolve_rows(&frame.pixels, w, h, &kernel, &mut tmp);
        convolve_cols(&tmp, w, h, &kernel, &mut out);
    }
    Ok(Frame {
        pixels: out,
        ..frame.clone()
    })
}
