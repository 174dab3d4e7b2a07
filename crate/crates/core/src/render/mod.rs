//! Deterministic renderer for the supported HTML/SVG subset.
//!
//! Rendering runs in two passes. Layout walks the tree and produces a display
//! list of device-space polygons plus the boxes of addressable elements; the
//! rasterizer then fills each polygon set with supersampled coverage. Both
//! passes are pure functions of the state and the options.

mod color;
mod diff;
mod geom;
mod html;
mod image;
mod raster;
mod style;
mod svg;
mod text;

use serde::{Deserialize, Serialize};

use crate::dom::{DomState, NodeId, NodeRef};

pub use color::{parse_color, parse_paint, Paint, Rgba};
pub use diff::{diff_images, DiffError, DiffOptions, DiffReport, GridCell, PixelBox};
pub use geom::{parse_transform, Affine, Point, Rect};
pub use html::{BLOCK_SPACING, CARD_RADIUS, PADDING_X, PADDING_Y};
pub use image::{downsample, ImageError, RasterImage};
pub use raster::{FillRule, PaintOp};
pub use text::{metrics, FontMetrics, DEFAULT_FONT_SIZE};

pub const DEFAULT_SUPERSAMPLE: u32 = 4;
pub const MIN_HEIGHT: u32 = 100;
pub const DEFAULT_MAX_HEIGHT: u32 = 16_384;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct RenderOptions {
    pub canvas_width: u32,
    /// Background as `#rrggbb`.
    #[serde(with = "hex_color")]
    pub background: Rgba,
    pub supersample: u32,
    pub max_height: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            canvas_width: crate::parser::DEFAULT_CANVAS_WIDTH as u32,
            background: Rgba::WHITE,
            supersample: DEFAULT_SUPERSAMPLE,
            max_height: DEFAULT_MAX_HEIGHT,
        }
    }
}

mod hex_color {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_color, Rgba};

    pub fn serialize<S: Serializer>(c: &Rgba, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(c)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rgba, D::Error> {
        let text = String::deserialize(d)?;
        parse_color(&text).ok_or_else(|| serde::de::Error::custom(format!("invalid color {text:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("layout height {height}px exceeds the maximum of {max}px")]
    CanvasOverflow { height: u64, max: u32 },
    #[error("invalid render options: {0}")]
    InvalidOptions(String),
}

/// Device-space box of an addressable element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutBox {
    pub id: NodeId,
    pub tag: String,
    pub bounds: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub image: RasterImage,
    pub layout: Vec<LayoutBox>,
}

#[derive(Debug, Default)]
pub(crate) struct DisplayList {
    pub ops: Vec<PaintOp>,
    pub boxes: Vec<LayoutBox>,
}

impl DisplayList {
    /// Records the box of `node` if it has an id: the union of the ops painted
    /// since `start` and `extra`.
    pub fn record_box(&mut self, node: &NodeRef<'_>, start: usize, extra: Option<Rect>) {
        let Some(id) = node.id() else { return };
        let bounds = self.ops[start..]
            .iter()
            .filter_map(PaintOp::bounds)
            .chain(extra)
            .reduce(|a, b| a.union(&b));
        if let Some(bounds) = bounds {
            self.merge_box(id, node.tag(), bounds);
        }
    }

    pub fn merge_box(&mut self, id: &NodeId, tag: &str, bounds: Rect) {
        match self.boxes.iter_mut().find(|b| &b.id == id) {
            Some(b) => b.bounds = b.bounds.union(&bounds),
            None => self.boxes.push(LayoutBox {
                id: id.clone(),
                tag: tag.to_owned(),
                bounds,
            }),
        }
    }
}

/// Lays out `state` without rasterizing. Returns the display list and the
/// canvas height.
pub(crate) fn layout(state: &DomState, opts: &RenderOptions) -> Result<(DisplayList, u32), RenderError> {
    if opts.canvas_width == 0 || opts.supersample == 0 {
        return Err(RenderError::InvalidOptions(
            "canvas width and supersample factor must be positive".into(),
        ));
    }
    let mut dl = DisplayList::default();
    let content = html::layout_body(state, f64::from(opts.canvas_width), &mut dl);
    let height = libm::ceil(content).max(f64::from(MIN_HEIGHT));
    if height > f64::from(opts.max_height) {
        return Err(RenderError::CanvasOverflow {
            height: height as u64,
            max: opts.max_height,
        });
    }
    Ok((dl, height as u32))
}

/// Renders the state and reports the boxes of addressable elements.
pub fn render_with_layout(state: &DomState, opts: &RenderOptions) -> Result<Rendered, RenderError> {
    let (dl, height) = layout(state, opts)?;
    let mut raster = raster::Rasterizer::new(opts.canvas_width, height, opts.background, opts.supersample);
    for op in &dl.ops {
        raster.fill(op);
    }
    Ok(Rendered {
        image: raster.finish(),
        layout: dl.boxes,
    })
}

pub fn render(state: &DomState, opts: &RenderOptions) -> Result<RasterImage, RenderError> {
    render_with_layout(state, opts).map(|r| r.image)
}

/// Boxes of addressable elements, without rasterizing.
pub fn layout_boxes(state: &DomState, opts: &RenderOptions) -> Result<Vec<LayoutBox>, RenderError> {
    layout(state, opts).map(|(dl, _)| dl.boxes)
}
