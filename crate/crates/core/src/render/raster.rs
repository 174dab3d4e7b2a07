//! Scanline polygon rasterizer with point-sampled supersampling.
//!
//! Each paint op is sampled on an `s x s` grid per pixel, the hit count
//! becomes coverage, and the op's color is blended src-over in integer
//! arithmetic. No floating point touches the pixel buffer.

use super::color::Rgba;
use super::geom::{Point, Rect};
use super::image::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillRule {
    #[default]
    NonZero,
    EvenOdd,
}

/// One filled shape in device coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PaintOp {
    pub polygons: Vec<Vec<Point>>,
    pub rule: FillRule,
    pub color: Rgba,
    pub clip: Option<Rect>,
}

impl PaintOp {
    pub fn bounds(&self) -> Option<Rect> {
        let b = Rect::from_points(self.polygons.iter().flatten())?;
        match self.clip {
            Some(c) => b.intersect(&c),
            None => Some(b),
        }
    }
}

struct Edge {
    x0: f64,
    y0: f64,
    y1: f64,
    slope: f64,
    dir: i32,
}

/// First sample index whose center `(i + 0.5) / s` is at or after `v`.
fn first_sample(v: f64, s: f64) -> i64 {
    libm::ceil(v * s - 0.5) as i64
}

pub struct Rasterizer {
    image: RasterImage,
    ss: u32,
}

impl Rasterizer {
    pub fn new(width: u32, height: u32, background: Rgba, supersample: u32) -> Self {
        let mut image = RasterImage::filled(width, height, background);
        image.dpi_scale = supersample.max(1);
        Self {
            image,
            ss: supersample.max(1),
        }
    }

    pub fn finish(self) -> RasterImage {
        self.image
    }

    pub fn fill(&mut self, op: &PaintOp) {
        if op.color.a == 0 {
            return;
        }
        let Some(bounds) = op.bounds() else { return };
        let canvas = Rect::new(0.0, 0.0, f64::from(self.image.width()), f64::from(self.image.height()));
        let Some(bounds) = bounds.intersect(&canvas) else { return };
        let s = self.ss as i64;
        let sf = self.ss as f64;

        let mut edges: Vec<Edge> = Vec::new();
        for poly in &op.polygons {
            let n = poly.len();
            if n < 3 {
                continue;
            }
            for i in 0..n {
                let (p, q) = (poly[i], poly[(i + 1) % n]);
                if p.y == q.y || !(p.x.is_finite() && p.y.is_finite() && q.x.is_finite() && q.y.is_finite()) {
                    continue;
                }
                let (top, bot, dir) = if p.y < q.y { (p, q, 1) } else { (q, p, -1) };
                edges.push(Edge {
                    x0: top.x,
                    y0: top.y,
                    y1: bot.y,
                    slope: (bot.x - top.x) / (bot.y - top.y),
                    dir,
                });
            }
        }
        if edges.is_empty() {
            return;
        }
        edges.sort_by(|a, b| a.y0.total_cmp(&b.y0));

        let sx_min = first_sample(bounds.x0, sf).max(0);
        let sx_max = first_sample(bounds.x1, sf).min(i64::from(self.image.width()) * s);
        let sy_min = first_sample(bounds.y0, sf).max(0);
        let sy_max = first_sample(bounds.y1, sf).min(i64::from(self.image.height()) * s);
        if sx_min >= sx_max || sy_min >= sy_max {
            return;
        }
        let px_min = (sx_min / s) as usize;
        let px_max = ((sx_max - 1) / s) as usize;
        let mut coverage = vec![0u32; px_max - px_min + 1];
        let mut crossings: Vec<(f64, i32)> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut next_edge = 0;
        let mut row = sy_min / s;
        let full = (s * s) as u32;

        for sy in sy_min..sy_max {
            if sy / s != row {
                self.blend_row(row as u32, px_min, &mut coverage, op.color, full);
                row = sy / s;
            }
            let y = (sy as f64 + 0.5) / sf;
            while next_edge < edges.len() && edges[next_edge].y0 <= y {
                active.push(next_edge);
                next_edge += 1;
            }
            active.retain(|&i| edges[i].y1 > y);
            crossings.clear();
            for &i in &active {
                let e = &edges[i];
                if e.y0 <= y {
                    crossings.push((e.x0 + (y - e.y0) * e.slope, e.dir));
                }
            }
            if crossings.len() < 2 {
                continue;
            }
            crossings.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut winding = 0;
            for k in 0..crossings.len() - 1 {
                winding += crossings[k].1;
                let inside = match op.rule {
                    FillRule::NonZero => winding != 0,
                    FillRule::EvenOdd => winding % 2 != 0,
                };
                if !inside {
                    continue;
                }
                let a = first_sample(crossings[k].0, sf).max(sx_min);
                let b = first_sample(crossings[k + 1].0, sf).min(sx_max);
                if a < b {
                    add_span(&mut coverage, px_min, a, b, s);
                }
            }
        }
        self.blend_row(row as u32, px_min, &mut coverage, op.color, full);
    }

    fn blend_row(&mut self, row: u32, px_min: usize, coverage: &mut [u32], color: Rgba, full: u32) {
        if row >= self.image.height() {
            coverage.fill(0);
            return;
        }
        let width = self.image.width() as usize;
        let base = row as usize * width * 4;
        let pixels = self.image.pixels_mut();
        for (i, cov) in coverage.iter_mut().enumerate() {
            if *cov == 0 {
                continue;
            }
            let alpha = (u32::from(color.a) * *cov * 2 + full) / (2 * full);
            *cov = 0;
            if alpha == 0 {
                continue;
            }
            let at = base + (px_min + i) * 4;
            let px = &mut pixels[at..at + 4];
            let inv = 255 - alpha;
            for (c, src) in [color.r, color.g, color.b].into_iter().enumerate() {
                px[c] = ((u32::from(src) * alpha + u32::from(px[c]) * inv + 127) / 255) as u8;
            }
            px[3] = (alpha + (u32::from(px[3]) * inv + 127) / 255) as u8;
        }
    }
}

/// Adds the samples `[a, b)` of one sub-scanline to per-pixel coverage.
fn add_span(coverage: &mut [u32], px_min: usize, a: i64, b: i64, s: i64) {
    let pa = (a / s) as usize;
    let pb = ((b - 1) / s) as usize;
    if pa == pb {
        coverage[pa - px_min] += (b - a) as u32;
        return;
    }
    coverage[pa - px_min] += (s - a % s) as u32;
    for c in &mut coverage[pa + 1 - px_min..pb - px_min] {
        *c += s as u32;
    }
    coverage[pb - px_min] += (b - pb as i64 * s) as u32;
}
