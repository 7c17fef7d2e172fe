//! Binary morphology with square structuring elements of side `2r + 1`.
//!
//! Pixels outside the frame are ignored: erosion takes the minimum and
//! dilation the maximum over the in-bounds part of the window. With that
//! rule opening never adds foreground and closing never removes it, border
//! included.

use super::Mask;

fn decide(ones: u32, window: usize, erode: bool) -> bool {
    if erode {
        ones as usize == window
    } else {
        ones > 0
    }
}

/// One pass along rows with a prefix count. `erode` keeps a pixel when
/// every in-bounds neighbor is set, otherwise a pixel is set when any
/// neighbor is.
fn row_pass(src: &Mask, r: usize, erode: bool) -> Mask {
    let (w, h) = (src.width, src.height);
    let mut out = Mask::empty(w, h);
    let mut prefix = vec![0u32; w + 1];
    for y in 0..h {
        let row = &src.data[y * w..(y + 1) * w];
        for (i, &v) in row.iter().enumerate() {
            prefix[i + 1] = prefix[i] + v as u32;
        }
        for (i, o) in out.data[y * w..(y + 1) * w].iter_mut().enumerate() {
            let lo = i.saturating_sub(r);
            let hi = (i + r).min(w - 1);
            *o = decide(prefix[hi + 1] - prefix[lo], hi - lo + 1, erode);
        }
    }
    out
}

/// Same rule down columns, walking rows in memory order with a running
/// per-column count over the window.
fn col_pass(src: &Mask, r: usize, erode: bool) -> Mask {
    let (w, h) = (src.width, src.height);
    let mut out = Mask::empty(w, h);
    let mut counts = vec![0u32; w];
    for y in 0..r.min(h) {
        for (c, &v) in counts.iter_mut().zip(&src.data[y * w..(y + 1) * w]) {
            *c += v as u32;
        }
    }
    for y in 0..h {
        if y + r < h {
            let enter = y + r;
            for (c, &v) in counts.iter_mut().zip(&src.data[enter * w..(enter + 1) * w]) {
                *c += v as u32;
            }
        }
        if y > r {
            let leave = y - r - 1;
            for (c, &v) in counts.iter_mut().zip(&src.data[leave * w..(leave + 1) * w]) {
                *c -= v as u32;
            }
        }
        let window = (y + r).min(h - 1) - y.saturating_sub(r) + 1;
        for (o, &c) in out.data[y * w..(y + 1) * w].iter_mut().zip(&counts) {
            *o = decide(c, window, erode);
        }
    }
    out
}

pub fn erode(mask: &Mask, radius: usize) -> Mask {
    if radius == 0 || mask.data.is_empty() {
        return mask.clone();
    }
    col_pass(&row_pass(mask, radius, true), radius, true)
}

pub fn dilate(mask: &Mask, radius: usize) -> Mask {
    if radius == 0 || mask.data.is_empty() {
        return mask.clone();
    }
    col_pass(&row_pass(mask, radius, false), radius, false)
}

pub fn open(mask: &Mask, radius: usize) -> Mask {
    dilate(&erode(mask, radius), radius)
}

pub fn close(mask: &Mask, radius: usize) -> Mask {
    erode(&dilate(mask, radius), radius)
}

/// Opening to drop specks, then closing to fill small gaps.
pub fn morph_clean(mask: &Mask, open_radius: usize, close_radius: usize) -> Mask {
    close(&open(mask, open_radius), close_radius)
}
