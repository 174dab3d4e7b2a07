//! Pixel-level comparison with per-region scores.

use serde::{Deserialize, Serialize};

use super::image::RasterImage;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("image dimensions differ: {a_w}x{a_h} vs {b_w}x{b_h}")]
    DimensionMismatch { a_w: u32, a_h: u32, b_w: u32, b_h: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct DiffOptions {
    /// Largest per-channel difference still counted as a match.
    pub tolerance: u8,
    pub grid_rows: u32,
    pub grid_cols: u32,
}

impl Default for DiffOptions {
    fn default() -> Self {
        Self {
            tolerance: 0,
            grid_rows: 8,
            grid_cols: 8,
        }
    }
}

/// Half-open pixel rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl PixelBox {
    pub fn intersects(&self, o: &PixelBox) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridCell {
    pub row: u32,
    pub col: u32,
    pub bounds: PixelBox,
    pub mismatch_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffReport {
    pub width: u32,
    pub height: u32,
    pub mismatched_pixels: u64,
    pub mismatched_pixel_fraction: f64,
    /// Row-major grid; cell edges sit at `floor(i * size / count)`.
    pub per_region_scores: Vec<GridCell>,
    /// Bounding box of the largest 4-connected mismatched region.
    pub bbox: Option<PixelBox>,
}

pub fn diff_images(a: &RasterImage, b: &RasterImage, opts: &DiffOptions) -> Result<DiffReport, DiffError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(DiffError::DimensionMismatch {
            a_w: a.width(),
            a_h: a.height(),
            b_w: b.width(),
            b_h: b.height(),
        });
    }
    let (w, h) = (a.width() as usize, a.height() as usize);
    let mask: Vec<bool> = a
        .pixels()
        .chunks_exact(4)
        .zip(b.pixels().chunks_exact(4))
        .map(|(p, q)| p.iter().zip(q).any(|(x, y)| x.abs_diff(*y) > opts.tolerance))
        .collect();
    let mismatched = mask.iter().filter(|m| **m).count() as u64;
    let total = (w * h) as u64;

    let rows = opts.grid_rows.clamp(1, a.height().max(1));
    let cols = opts.grid_cols.clamp(1, a.width().max(1));
    let edge = |i: u32, size: u32, count: u32| (u64::from(i) * u64::from(size) / u64::from(count)) as u32;
    let mut cells = Vec::with_capacity((rows * cols) as usize);
    for r in 0..rows {
        for c in 0..cols {
            let bounds = PixelBox {
                x0: edge(c, a.width(), cols),
                x1: edge(c + 1, a.width(), cols),
                y0: edge(r, a.height(), rows),
                y1: edge(r + 1, a.height(), rows),
            };
            let mut count = 0u64;
            for y in bounds.y0..bounds.y1 {
                let row = &mask[y as usize * w..];
                count += row[bounds.x0 as usize..bounds.x1 as usize].iter().filter(|m| **m).count() as u64;
            }
            let area = u64::from(bounds.x1 - bounds.x0) * u64::from(bounds.y1 - bounds.y0);
            cells.push(GridCell {
                row: r,
                col: c,
                bounds,
                mismatch_fraction: if area == 0 { 0.0 } else { count as f64 / area as f64 },
            });
        }
    }

    Ok(DiffReport {
        width: a.width(),
        height: a.height(),
        mismatched_pixels: mismatched,
        mismatched_pixel_fraction: if total == 0 { 0.0 } else { mismatched as f64 / total as f64 },
        per_region_scores: cells,
        bbox: largest_region(&mask, w, h),
    })
}

/// Largest 4-connected component of `mask`; ties go to the component found
/// first in row-major order.
fn largest_region(mask: &[bool], w: usize, h: usize) -> Option<PixelBox> {
    let mut seen = vec![false; mask.len()];
    let mut best: Option<(usize, PixelBox)> = None;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x + 1);
            y1 = y1.max(y + 1);
            let mut visit = |j: usize| {
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if best.as_ref().is_none_or(|(s, _)| size > *s) {
            best = Some((
                size,
                PixelBox {
                    x0: x0 as u32,
                    y0: y0 as u32,
                    x1: x1 as u32,
                    y1: y1 as u32,
                },
            ));
        }
    }
    best.map(|(_, b)| b)
}
