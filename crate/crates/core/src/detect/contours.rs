use std::collections::VecDeque;
use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::Mask;
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BBox {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x as f64
            && p.y >= self.y as f64
            && p.x <= (self.x + self.w - 1) as f64
            && p.y <= (self.y + self.h - 1) as f64
    }
}

/// One 8-connected foreground component, image coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRegion {
    pub centroid: Point2,
    pub bbox: BBox,
    pub area: f64,
    pub perimeter: f64,
    pub circularity: f64,
    pub score: f64,
}

// Clockwise around a pixel with y pointing down: W, NW, N, NE, E, SE, S, SW.
const RING: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn ring_index(dx: i64, dy: i64) -> usize {
    RING.iter().position(|&d| d == (dx, dy)).expect("unit offset")
}

/// Length of the outer boundary of the component containing `start`,
/// which must be its first pixel in raster order. Moore-neighbor tracing
/// with unit steps for axis moves and sqrt(2) for diagonals; stops when the
/// first move out of `start` is about to repeat.
fn trace_perimeter(labels: &[u32], w: usize, h: usize, label: u32, start: (usize, usize)) -> f64 {
    let inside = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && labels[y as usize * w + x as usize] == label
    };
    let s = (start.0 as i64, start.1 as i64);
    let mut p = s;
    // Entered from the west: the west neighbor of a raster-first pixel is
    // background.
    let mut back = 0usize;
    let mut first_move: Option<((i64, i64), (i64, i64))> = None;
    let mut length = 0.0;
    let limit = 4 * w * h + 16;
    for _ in 0..limit {
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let q = (p.0 + RING[d].0, p.1 + RING[d].1);
            if inside(q.0, q.1) {
                let prev = (back + k - 1) % 8;
                let b = (p.0 + RING[prev].0, p.1 + RING[prev].1);
                next = Some((q, b));
                break;
            }
        }
        let Some((q, b)) = next else {
            return 0.0; // isolated pixel
        };
        if p == s {
            match first_move {
                None => first_move = Some((p, q)),
                Some((_, q0)) if q0 == q => break,
                Some(_) => {}
            }
        }
        length += if q.0 != p.0 && q.1 != p.1 { SQRT_2 } else { 1.0 };
        back = ring_index(b.0 - q.0, b.1 - q.1);
        p = q;
    }
    length
}

/// Label 8-connected foreground components and summarize each one.
///
/// Regions come out in raster order of their first pixel. Circularity is
/// `4 pi area / perimeter^2` clamped to `[0, 1]`; a zero-length boundary
/// (single pixel) counts as fully circular. Scores are left at zero.
pub fn find_contours(mask: &Mask) -> Vec<CandidateRegion> {
    let (w, h) = (mask.width, mask.height);
    let mut labels = vec![0u32; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    let mut next_label = 0u32;
    for sy in 0..h {
        for sx in 0..w {
            if !mask.get(sx, sy) || labels[sy * w + sx] != 0 {
                continue;
            }
            next_label += 1;
            labels[sy * w + sx] = next_label;
            queue.push_back((sx, sy));
            let (mut area, mut sum_x, mut sum_y) = (0usize, 0.0f64, 0.0f64);
            let (mut x0, mut y0, mut x1, mut y1) = (sx, sy, sx, sy);
            while let Some((x, y)) = queue.pop_front() {
                area += 1;
                sum_x += x as f64;
                sum_y += y as f64;
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
                for &(dx, dy) in &RING {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if mask.get(nx, ny) && labels[ny * w + nx] == 0 {
                        labels[ny * w + nx] = next_label;
                        queue.push_back((nx, ny));
                    }
                }
            }
            regions.push((
                next_label,
                (sx, sy),
                area,
                sum_x,
                sum_y,
                BBox {
                    x: x0,
                    y: y0,
                    w: x1 - x0 + 1,
                    h: y1 - y0 + 1,
                },
            ));
        }
    }
    regions
        .into_iter()
        .map(|(label, start, area, sx, sy, bbox)| {
            let perimeter = trace_perimeter(&labels, w, h, label, start);
            let area_f = area as f64;
            let circularity = if perimeter > 0.0 {
                (4.0 * PI * area_f / (perimeter * perimeter)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            CandidateRegion {
                centroid: Point2::new(sx / area_f, sy / area_f),
                bbox,
                area: area_f,
                perimeter,
                circularity,
                score: 0.0,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn disk(w: usize, h: usize, cx: f64, cy: f64, r: f64) -> Mask {
        let mut m = Mask::empty(w, h);
        for y in 0..h {
            for x in 0..w {
                if (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    #[test]
    fn empty_mask_no_regions() {
        assert!(find_contours(&Mask::empty(10, 10)).is_empty());
    }

    #[test]
    fn rasterized_disk() {
        let m = disk(40, 40, 20.0, 20.0, 10.0);
        let regions = find_contours(&m);
        assert_eq!(regions.len(), 1);
        let r = &regions[0];
        assert_eq!(r.area as usize, m.count());
        assert!((r.area - PI * 100.0).abs() / (PI * 100.0) < 0.05, "area {}", r.area);
        assert!(r.circularity > 0.8, "circularity {}", r.circularity);
        assert!((r.centroid.x - 20.0).abs() < 1e-9 && (r.centroid.y - 20.0).abs() < 1e-9);
        assert!(r.bbox.contains(r.centroid));
    }

    #[test]
    fn two_components() {
        let mut m = disk(60, 30, 12.0, 15.0, 6.0);
        let d2 = disk(60, 30, 45.0, 15.0, 6.0);
        for (a, b) in m.data.iter_mut().zip(&d2.data) {
            *a |= *b;
        }
        assert_eq!(find_contours(&m).len(), 2);
    }

    #[test]
    fn diagonal_pixels_are_connected() {
        let mut m = Mask::empty(5, 5);
        m.set(0, 0, true);
        m.set(1, 1, true);
        m.set(2, 2, true);
        let r = find_contours(&m);
        assert_eq!(r.len(), 1);
        assert!((r[0].perimeter - 4.0 * SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn square_perimeter() {
        let mut m = Mask::empty(12, 12);
        for y in 2..7 {
            for x in 3..8 {
                m.set(x, y, true);
            }
        }
        let r = find_contours(&m);
        assert_eq!(r[0].perimeter, 16.0);
        assert_eq!(r[0].bbox, BBox { x: 3, y: 2, w: 5, h: 5 });
    }

    #[test]
    fn ring_perimeter_is_outer_boundary() {
        let mut m = Mask::empty(10, 10);
        for y in 1..8 {
            for x in 1..8 {
                if !(3..6).contains(&x) || !(3..6).contains(&y) {
                    m.set(x, y, true);
                }
            }
        }
        let r = find_contours(&m);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].perimeter, 24.0);
    }

    fn mask_strategy() -> impl Strategy<Value = Mask> {
        (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
            proptest::collection::vec(proptest::bool::weighted(0.35), w * h).prop_map(move |data| Mask {
                width: w,
                height: h,
                data,
            })
        })
    }

    proptest! {
        #[test]
        fn regions_partition_foreground(m in mask_strategy()) {
            let regions = find_contours(&m);
            let total: f64 = regions.iter().map(|r| r.area).sum();
            prop_assert_eq!(total as usize, m.count());
            for r in &regions {
                prop_assert!(r.area > 0.0);
                prop_assert!(r.bbox.contains(r.centroid));
                prop_assert!((0.0..=1.0).contains(&r.circularity));
            }
        }
    }
}
