//! Block layout for the HTML side of the subset.
//!
//! Top-level blocks stack vertically with a fixed gap and fixed padding.
//! Inside a block, inline content is word-wrapped with the embedded font
//! metrics and block children stack below each other.

use crate::dom::{DomState, NodeId, NodeRef};

use super::color::Rgba;
use super::geom::{rounded_rect, Affine, Point, Rect};
use super::raster::{FillRule, PaintOp};
use super::style::Style;
use super::svg::{is_graphics_tag, paint_node, paint_svg};
use super::text::{glyph_polygons, metrics, text_width, FontMetrics};
use super::DisplayList;

pub const BLOCK_SPACING: f64 = 12.0;
pub const PADDING_Y: f64 = 10.0;
pub const PADDING_X: f64 = 14.0;
pub const CARD_RADIUS: f64 = 12.0;
const LIST_INDENT: f64 = 16.0;
const BULLET: f64 = 5.0;
const CELL_PADDING: f64 = 4.0;
/// Extent below a bare graphics block's origin that its clip allows.
const OPEN_CLIP_EXTENT: f64 = 1.0e6;

/// `text` elements act as SVG text when positioned, as inline text otherwise.
fn is_graphic(node: &NodeRef<'_>) -> bool {
    let tag = node.tag();
    is_graphics_tag(tag) && (tag != "text" || node.attr("x").is_some() || node.attr("y").is_some())
}

fn is_inline(node: &NodeRef<'_>) -> bool {
    matches!(node.tag(), "span" | "strong") || (node.tag() == "text" && !is_graphic(node))
}

/// Lays out the body and returns the content height.
pub(crate) fn layout_body(state: &DomState, width: f64, dl: &mut DisplayList) -> f64 {
    let base = Style::default();
    let mut y = 0.0;
    let mut first = true;
    for child in state.body().children() {
        if child.is_text_run() || base.child(&child).display_none {
            continue;
        }
        if !first {
            y += BLOCK_SPACING;
        }
        first = false;
        y += layout_top(&child, y, width, &base, dl);
    }
    y
}

fn layout_top(node: &NodeRef<'_>, y: f64, width: f64, base: &Style, dl: &mut DisplayList) -> f64 {
    if node.tag() == "svg" {
        return paint_svg(node, &Affine::IDENTITY, Point::new(0.0, y), None, base, dl).1;
    }
    if is_graphic(node) {
        return bare_graphics(node, Point::new(0.0, y), width, base, dl);
    }
    let style = base.child(node);
    let start = dl.ops.len();
    let content = flow_block(node, &style, PADDING_X, y + PADDING_Y, width - 2.0 * PADDING_X, dl);
    let h = content + 2.0 * PADDING_Y;
    let rect = Rect::new(0.0, y, width, y + h);
    paint_background(&style, rect, start, dl);
    dl.record_box(node, start, Some(rect));
    h
}

/// SVG graphics outside any `svg`: drawn in a user space whose origin is the
/// block's top-left corner. The block is as tall as the ink below it.
fn bare_graphics(node: &NodeRef<'_>, origin: Point, width: f64, parent: &Style, dl: &mut DisplayList) -> f64 {
    let start = dl.ops.len();
    let clip = Rect::new(origin.x, origin.y, origin.x + width, origin.y + OPEN_CLIP_EXTENT);
    paint_node(node, &Affine::translate(origin.x, origin.y), clip, parent, dl);
    let bottom = dl.ops[start..]
        .iter()
        .filter_map(PaintOp::bounds)
        .map(|b| b.y1)
        .fold(origin.y, f64::max);
    libm::ceil(bottom - origin.y)
}

fn paint_background(style: &Style, rect: Rect, index: usize, dl: &mut DisplayList) {
    let Some(color) = style.background else { return };
    let radius = style.border_radius.unwrap_or(CARD_RADIUS);
    let shape = rounded_rect(rect.x0, rect.y0, rect.width(), rect.height(), radius, radius, 1.0);
    dl.ops.insert(
        index,
        PaintOp {
            polygons: vec![shape.points],
            rule: FillRule::NonZero,
            color: color.with_opacity(style.opacity),
            clip: None,
        },
    );
}

#[derive(Debug, Clone)]
struct Atom {
    word: String,
    space_before: bool,
    metrics: FontMetrics,
    bold: bool,
    color: Rgba,
    owner: Option<(NodeId, String)>,
}

struct Flow<'a> {
    x: f64,
    width: f64,
    cursor: f64,
    atoms: Vec<Atom>,
    pending_space: bool,
    dl: &'a mut DisplayList,
}

/// Lays out the content of `node` in a column and returns its height.
fn flow_block(node: &NodeRef<'_>, style: &Style, x: f64, y: f64, width: f64, dl: &mut DisplayList) -> f64 {
    let mut flow = Flow {
        x,
        width: width.max(1.0),
        cursor: y,
        atoms: Vec::new(),
        pending_space: false,
        dl,
    };
    flow.content(node, style, None);
    flow.flush();
    flow.cursor - y
}

impl Flow<'_> {
    fn content(&mut self, node: &NodeRef<'_>, style: &Style, owner: Option<(NodeId, String)>) {
        if let Some(text) = node.text() {
            self.push_text(text, style, &owner);
        }
        for child in node.children() {
            if child.is_text_run() {
                if let Some(text) = child.text() {
                    self.push_text(text, style, &owner);
                }
                continue;
            }
            let cs = style.child(&child);
            if cs.display_none {
                continue;
            }
            if is_inline(&child) {
                let inner = child.id().map(|id| (id.clone(), child.tag().to_owned())).or(owner.clone());
                self.content(&child, &cs, inner);
            } else {
                self.flush();
                self.block(&child, &cs, style);
            }
        }
    }

    fn push_text(&mut self, text: &str, style: &Style, owner: &Option<(NodeId, String)>) {
        let m = metrics(style.font_size);
        let mut word = String::new();
        let flush_word = |word: &mut String, flow: &mut Flow<'_>| {
            if !word.is_empty() {
                flow.atoms.push(Atom {
                    word: std::mem::take(word),
                    space_before: flow.pending_space,
                    metrics: m,
                    bold: style.bold,
                    color: style.text_color(),
                    owner: owner.clone(),
                });
                flow.pending_space = false;
            }
        };
        for c in text.chars() {
            if c.is_whitespace() {
                flush_word(&mut word, self);
                self.pending_space = true;
            } else {
                word.push(c);
            }
        }
        flush_word(&mut word, self);
    }

    fn block(&mut self, node: &NodeRef<'_>, style: &Style, parent: &Style) {
        let start = self.dl.ops.len();
        let top = self.cursor;
        match node.tag() {
            "svg" => {
                let (_, h) = paint_svg(node, &Affine::IDENTITY, Point::new(self.x, top), None, parent, self.dl);
                self.cursor += h;
                return;
            }
            _ if is_graphic(node) => {
                self.cursor += bare_graphics(node, Point::new(self.x, top), self.width, parent, self.dl);
                return;
            }
            "ul" => {
                for child in node.children() {
                    if child.is_text_run() {
                        continue;
                    }
                    let cs = style.child(&child);
                    if !cs.display_none {
                        self.block(&child, &cs, style);
                    }
                }
            }
            "li" => {
                let m = metrics(style.font_size);
                let by = top + (m.line_height - BULLET) / 2.0;
                let bullet = Rect::new(self.x + 5.0, by, self.x + 5.0 + BULLET, by + BULLET);
                self.dl.ops.push(PaintOp {
                    polygons: vec![bullet.corners().to_vec()],
                    rule: FillRule::NonZero,
                    color: style.text_color(),
                    clip: None,
                });
                let h = flow_block(
                    node,
                    style,
                    self.x + LIST_INDENT,
                    top,
                    self.width - LIST_INDENT,
                    self.dl,
                );
                self.cursor += h.max(m.line_height);
            }
            "table" => self.table(node, style),
            "tr" => self.row(node, style, 1),
            _ => {
                let (px, py) = if style.background.is_some() {
                    (PADDING_X, PADDING_Y)
                } else {
                    (0.0, 0.0)
                };
                let h = flow_block(
                    node,
                    style,
                    self.x + px,
                    top + py,
                    self.width - 2.0 * px,
                    self.dl,
                );
                self.cursor += h + 2.0 * py;
            }
        }
        let rect = Rect::new(self.x, top, self.x + self.width, self.cursor);
        paint_background(style, rect, start, self.dl);
        self.dl.record_box(node, start, Some(rect));
    }

    fn table(&mut self, node: &NodeRef<'_>, style: &Style) {
        let cols = node
            .children()
            .filter(|r| r.tag() == "tr")
            .map(|r| r.children().filter(|c| c.tag() == "td").count())
            .max()
            .unwrap_or(1)
            .max(1);
        for child in node.children() {
            if child.is_text_run() {
                continue;
            }
            let cs = style.child(&child);
            if cs.display_none {
                continue;
            }
            if child.tag() == "tr" {
                let start = self.dl.ops.len();
                let top = self.cursor;
                self.row(&child, &cs, cols);
                let rect = Rect::new(self.x, top, self.x + self.width, self.cursor);
                paint_background(&cs, rect, start, self.dl);
                self.dl.record_box(&child, start, Some(rect));
            } else {
                self.block(&child, &cs, style);
            }
        }
    }

    fn row(&mut self, node: &NodeRef<'_>, style: &Style, cols: usize) {
        let cw = self.width / cols as f64;
        let top = self.cursor;
        let mut height: f64 = 0.0;
        let mut cells = Vec::new();
        for (i, cell) in node.children().filter(|c| !c.is_text_run()).enumerate() {
            let cs = style.child(&cell);
            if cs.display_none {
                continue;
            }
            let start = self.dl.ops.len();
            let x = self.x + i as f64 * cw;
            let h = flow_block(
                &cell,
                &cs,
                x + CELL_PADDING,
                top + CELL_PADDING,
                cw - 2.0 * CELL_PADDING,
                self.dl,
            );
            height = height.max(h + 2.0 * CELL_PADDING);
            cells.push((cell, cs, start, x));
        }
        // Cell rectangles need the final row height, so boxes come last.
        for (cell, cs, start, x) in cells.into_iter().rev() {
            let rect = Rect::new(x, top, x + cw, top + height);
            paint_background(&cs, rect, start, self.dl);
            self.dl.record_box(&cell, start, Some(rect));
        }
        self.cursor += height;
    }

    /// Breaks pending inline atoms into lines and paints them.
    fn flush(&mut self) {
        if self.atoms.is_empty() {
            self.pending_space = false;
            return;
        }
        let atoms = std::mem::take(&mut self.atoms);
        self.pending_space = false;
        let mut line: Vec<(Atom, f64)> = Vec::new();
        let mut line_w = 0.0;
        for atom in atoms {
            let w = text_width(&atom.word, &atom.metrics);
            let mut space = if atom.space_before && !line.is_empty() {
                atom.metrics.advance
            } else {
                0.0
            };
            if !line.is_empty() && line_w + space + w > self.width {
                self.emit_line(std::mem::take(&mut line));
                line_w = 0.0;
                space = 0.0;
            }
            if line.is_empty() && w > self.width {
                line_w = self.split_long(atom, &mut line);
                continue;
            }
            line.push((atom, line_w + space));
            line_w += space + w;
        }
        self.emit_line(line);
    }

    /// Emits full-width chunks of an over-long word and leaves the remainder
    /// on `line`. Returns the remainder's width.
    fn split_long(&mut self, atom: Atom, line: &mut Vec<(Atom, f64)>) -> f64 {
        let per_line = ((self.width / atom.metrics.advance) as usize).max(1);
        let chars: Vec<char> = atom.word.chars().collect();
        let chunks: Vec<String> = chars.chunks(per_line).map(|c| c.iter().collect()).collect();
        let last = chunks.len() - 1;
        for (i, chunk) in chunks.into_iter().enumerate() {
            let piece = Atom {
                word: chunk,
                ..atom.clone()
            };
            if i == last {
                let w = text_width(&piece.word, &piece.metrics);
                line.push((piece, 0.0));
                return w;
            }
            self.emit_line(vec![(piece, 0.0)]);
        }
        0.0
    }

    fn emit_line(&mut self, line: Vec<(Atom, f64)>) {
        if line.is_empty() {
            return;
        }
        let lh = line.iter().map(|(a, _)| a.metrics.line_height).fold(0.0, f64::max);
        let unit = line.iter().map(|(a, _)| a.metrics.advance).fold(0.0, f64::max) / 8.0;
        let top = self.cursor;
        let baseline = top + (lh - 8.0 * unit) / 2.0 + 6.0 * unit;
        let mut groups: Vec<(Rgba, Vec<Vec<Point>>)> = Vec::new();
        for (atom, off) in &line {
            let x = self.x + off;
            let polys = glyph_polygons(&atom.word, x, baseline, &atom.metrics, atom.bold, &Affine::IDENTITY);
            match groups.iter_mut().find(|(c, _)| *c == atom.color) {
                Some((_, g)) => g.extend(polys),
                None => groups.push((atom.color, polys)),
            }
            if let Some((id, tag)) = &atom.owner {
                let w = text_width(&atom.word, &atom.metrics);
                self.dl.merge_box(id, tag, Rect::new(x, top, x + w, top + lh));
            }
        }
        for (color, polygons) in groups {
            if !polygons.is_empty() {
                self.dl.ops.push(PaintOp {
                    polygons,
                    rule: FillRule::NonZero,
                    color,
                    clip: None,
                });
            }
        }
        self.cursor += lh;
    }
}
