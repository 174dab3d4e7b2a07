//! Embedded 8x8 bitmap font and fixed text metrics.

use font8x8::{UnicodeFonts, BASIC_FONTS, BLOCK_FONTS, BOX_FONTS, GREEK_FONTS, LATIN_FONTS, MISC_FONTS};

use super::geom::{Affine, Point, Rect};

/// Metrics for one font size, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FontMetrics {
    pub size: f64,
    /// Horizontal advance per character.
    pub advance: f64,
    pub line_height: f64,
}

const METRICS_TABLE: &[FontMetrics] = &[
    FontMetrics {
        size: 18.0,
        advance: 11.0,
        line_height: 26.0,
    },
    FontMetrics {
        size: 17.0,
        advance: 10.0,
        line_height: 25.0,
    },
    FontMetrics {
        size: 16.0,
        advance: 10.0,
        line_height: 23.0,
    },
    FontMetrics {
        size: 14.0,
        advance: 9.0,
        line_height: 20.0,
    },
];

pub const DEFAULT_FONT_SIZE: f64 = 16.0;

/// Table entry for the sanctioned sizes, proportional metrics otherwise.
pub fn metrics(size: f64) -> FontMetrics {
    let size = if size.is_finite() && size > 0.0 { size } else { DEFAULT_FONT_SIZE };
    METRICS_TABLE
        .iter()
        .find(|m| m.size == size)
        .copied()
        .unwrap_or(FontMetrics {
            size,
            advance: libm::round(size * 0.625),
            line_height: libm::round(size * 1.45),
        })
}

fn glyph(c: char) -> [u8; 8] {
    BASIC_FONTS
        .get(c)
        .or_else(|| LATIN_FONTS.get(c))
        .or_else(|| GREEK_FONTS.get(c))
        .or_else(|| BOX_FONTS.get(c))
        .or_else(|| BLOCK_FONTS.get(c))
        .or_else(|| MISC_FONTS.get(c))
        .or_else(|| BASIC_FONTS.get('?'))
        .unwrap_or([0; 8])
}

pub fn text_width(text: &str, m: &FontMetrics) -> f64 {
    text.chars().count() as f64 * m.advance
}

/// Outline rectangles for `text` with its left edge at `x` and baseline at
/// `baseline`, mapped through `to_device`.
///
/// Glyph cells are 8x8 units scaled to the advance; rows 0..6 sit above
/// the baseline and the last two rows are descender space.
pub fn glyph_polygons(
    text: &str,
    x: f64,
    baseline: f64,
    m: &FontMetrics,
    bold: bool,
    to_device: &Affine,
) -> Vec<Vec<Point>> {
    let unit = m.advance / 8.0;
    let top = baseline - 6.0 * unit;
    let mut out = Vec::new();
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            continue;
        }
        let gx = x + i as f64 * m.advance;
        for (row, bits) in glyph(c).iter().enumerate() {
            let mut col = 0;
            while col < 8 {
                if bits & (1 << col) == 0 {
                    col += 1;
                    continue;
                }
                let start = col;
                while col < 8 && bits & (1 << col) != 0 {
                    col += 1;
                }
                let extra = if bold { unit * 0.6 } else { 0.0 };
                let r = Rect::new(
                    gx + start as f64 * unit,
                    top + row as f64 * unit,
                    gx + col as f64 * unit + extra,
                    top + (row + 1) as f64 * unit,
                );
                out.push(r.corners().iter().map(|p| to_device.apply(*p)).collect());
            }
        }
    }
    out
}
