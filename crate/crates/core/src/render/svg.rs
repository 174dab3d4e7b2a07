//! SVG element painting into a display list.

use crate::dom::NodeRef;
use crate::parser::values::{parse_length, parse_path, parse_points, parse_view_box};

use super::geom::{dash, ellipse, flatten_path, parse_transform, rounded_rect, stroke_outline, Affine, Point, Polyline, Rect};
use super::raster::{FillRule, PaintOp};
use super::style::{Style, TextAnchor};
use super::text::{glyph_polygons, metrics, text_width};
use super::DisplayList;

const DEFAULT_SVG_WIDTH: f64 = 300.0;
const DEFAULT_SVG_HEIGHT: f64 = 150.0;

pub(crate) fn is_graphics_tag(tag: &str) -> bool {
    matches!(
        tag,
        "g" | "rect" | "circle" | "ellipse" | "line" | "polyline" | "polygon" | "path" | "text"
    )
}

fn num(node: &NodeRef<'_>, name: &str) -> Option<f64> {
    node.attr(name).and_then(parse_length)
}

fn num_or_zero(node: &NodeRef<'_>, name: &str) -> f64 {
    num(node, name).unwrap_or(0.0)
}

/// Viewport size of an `svg` element.
pub(crate) fn svg_size(node: &NodeRef<'_>) -> (f64, f64) {
    let vb = node.attr("viewBox").and_then(parse_view_box);
    let w = num(node, "width").filter(|w| *w > 0.0);
    let h = num(node, "height").filter(|h| *h > 0.0);
    match (w, h, vb) {
        (Some(w), Some(h), _) => (w, h),
        (Some(w), None, Some(v)) => (w, w * v[3] / v[2]),
        (None, Some(h), Some(v)) => (h * v[2] / v[3], h),
        (Some(w), None, None) => (w, DEFAULT_SVG_HEIGHT),
        (None, Some(h), None) => (DEFAULT_SVG_WIDTH, h),
        (None, None, Some(v)) => (v[2], v[3]),
        (None, None, None) => (DEFAULT_SVG_WIDTH, DEFAULT_SVG_HEIGHT),
    }
}

/// Maps the viewBox into the viewport with uniform centered scaling.
fn viewbox_transform(node: &NodeRef<'_>, w: f64, h: f64) -> Affine {
    let Some([vx, vy, vw, vh]) = node.attr("viewBox").and_then(parse_view_box) else {
        return Affine::IDENTITY;
    };
    let s = (w / vw).min(h / vh);
    let tx = (w - vw * s) / 2.0 - vx * s;
    let ty = (h - vh * s) / 2.0 - vy * s;
    Affine::translate(tx, ty).then(&Affine::scale(s, s))
}

/// Paints a top-level or nested `svg` whose viewport's top-left corner maps
/// to `origin` under `ctm`. Returns the viewport size.
pub(crate) fn paint_svg(
    node: &NodeRef<'_>,
    ctm: &Affine,
    origin: Point,
    clip: Option<Rect>,
    parent: &Style,
    dl: &mut DisplayList,
) -> (f64, f64) {
    let style = parent.child(node);
    let (w, h) = svg_size(node);
    if style.display_none {
        return (w, h);
    }
    let start = dl.ops.len();
    let place = ctm.then(&Affine::translate(origin.x, origin.y));
    let viewport = Rect::from_points(&Rect::new(0.0, 0.0, w, h).corners().map(|p| place.apply(p)))
        .expect("four corners");
    let clip = match clip {
        Some(c) => c.intersect(&viewport),
        None => Some(viewport),
    };
    if let Some(clip) = clip {
        let inner = place.then(&viewbox_transform(node, w, h));
        for child in node.children() {
            paint_node(&child, &inner, clip, &style, dl);
        }
    }
    dl.record_box(node, start, Some(viewport));
    (w, h)
}

/// Paints one SVG graphics element (or container) in user space `ctm`.
pub(crate) fn paint_node(node: &NodeRef<'_>, ctm: &Affine, clip: Rect, parent: &Style, dl: &mut DisplayList) {
    if node.is_text_run() {
        return;
    }
    let tag = node.tag();
    if tag == "svg" {
        let origin = Point::new(num_or_zero(node, "x"), num_or_zero(node, "y"));
        paint_svg(node, ctm, origin, Some(clip), parent, dl);
        return;
    }
    if !is_graphics_tag(tag) {
        return;
    }
    let style = parent.child(node);
    if style.display_none {
        return;
    }
    let ctm = match node.attr("transform").and_then(parse_transform) {
        Some(t) => ctm.then(&t),
        None => *ctm,
    };
    let start = dl.ops.len();
    let mut geometry_bounds = None;
    match tag {
        "g" => {
            for child in node.children() {
                paint_node(&child, &ctm, clip, &style, dl);
            }
        }
        "text" => paint_text(node, &ctm, clip, &style, dl),
        _ => {
            let scale = ctm.mean_scale();
            let (lines, fillable) = shape_geometry(node, scale);
            geometry_bounds = Rect::from_points(lines.iter().flat_map(|l| &l.points))
                .and_then(|b| Rect::from_points(&b.corners().map(|p| ctm.apply(p))));
            paint_shape(&lines, fillable, &ctm, clip, &style, dl);
        }
    }
    dl.record_box(node, start, geometry_bounds.and_then(|b| b.intersect(&clip)));
}

fn shape_geometry(node: &NodeRef<'_>, scale: f64) -> (Vec<Polyline>, bool) {
    let n = |name| num_or_zero(node, name);
    match node.tag() {
        "rect" => {
            let (w, h) = (n("width"), n("height"));
            if w <= 0.0 || h <= 0.0 {
                return (Vec::new(), true);
            }
            let (rx, ry) = match (num(node, "rx"), num(node, "ry")) {
                (Some(rx), Some(ry)) => (rx, ry),
                (Some(r), None) | (None, Some(r)) => (r, r),
                (None, None) => (0.0, 0.0),
            };
            (vec![rounded_rect(n("x"), n("y"), w, h, rx, ry, scale)], true)
        }
        "circle" => {
            let r = n("r");
            if r <= 0.0 {
                return (Vec::new(), true);
            }
            (vec![ellipse(n("cx"), n("cy"), r, r, scale)], true)
        }
        "ellipse" => {
            let (rx, ry) = (n("rx"), n("ry"));
            if rx <= 0.0 || ry <= 0.0 {
                return (Vec::new(), true);
            }
            (vec![ellipse(n("cx"), n("cy"), rx, ry, scale)], true)
        }
        "line" => (
            vec![Polyline {
                points: vec![Point::new(n("x1"), n("y1")), Point::new(n("x2"), n("y2"))],
                closed: false,
            }],
            false,
        ),
        "polyline" | "polygon" => {
            let points: Vec<Point> = node
                .attr("points")
                .and_then(parse_points)
                .unwrap_or_default()
                .into_iter()
                .map(|(x, y)| Point::new(x, y))
                .collect();
            if points.is_empty() {
                return (Vec::new(), true);
            }
            let closed = node.tag() == "polygon";
            (vec![Polyline { points, closed }], true)
        }
        "path" => {
            let segs = node.attr("d").and_then(|d| parse_path(d).ok()).unwrap_or_default();
            (flatten_path(&segs, scale), true)
        }
        _ => (Vec::new(), false),
    }
}

fn paint_shape(lines: &[Polyline], fillable: bool, ctm: &Affine, clip: Rect, style: &Style, dl: &mut DisplayList) {
    if lines.is_empty() {
        return;
    }
    if let (true, Some(color)) = (fillable, style.fill_color()) {
        let polygons: Vec<Vec<Point>> = lines
            .iter()
            .filter(|l| l.points.len() >= 3)
            .map(|l| l.points.iter().map(|p| ctm.apply(*p)).collect())
            .collect();
        if !polygons.is_empty() {
            dl.ops.push(PaintOp {
                polygons,
                rule: style.fill_rule,
                color,
                clip: Some(clip),
            });
        }
    }
    if let Some(color) = style.stroke_color() {
        let scale = ctm.mean_scale();
        let mut polygons = Vec::new();
        for line in lines {
            let pieces = if style.dash.is_empty() {
                vec![line.clone()]
            } else {
                dash(line, &style.dash)
            };
            for piece in &pieces {
                for poly in stroke_outline(piece, style.stroke_width, style.line_cap, scale) {
                    polygons.push(poly.into_iter().map(|p| ctm.apply(p)).collect());
                }
            }
        }
        if !polygons.is_empty() {
            dl.ops.push(PaintOp {
                polygons,
                rule: FillRule::NonZero,
                color,
                clip: Some(clip),
            });
        }
    }
}

/// Character data of a subtree with whitespace runs collapsed.
pub(crate) fn collapsed_text(node: &NodeRef<'_>) -> String {
    let raw = node.to_tree().text_content();
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn paint_text(node: &NodeRef<'_>, ctm: &Affine, clip: Rect, style: &Style, dl: &mut DisplayList) {
    let Some(color) = style.fill_color() else { return };
    let text = collapsed_text(node);
    if text.is_empty() {
        return;
    }
    let m = metrics(style.font_size);
    let width = text_width(&text, &m);
    let x = num_or_zero(node, "x");
    let x = match style.anchor {
        TextAnchor::Start => x,
        TextAnchor::Middle => x - width / 2.0,
        TextAnchor::End => x - width,
    };
    let polygons = glyph_polygons(&text, x, num_or_zero(node, "y"), &m, style.bold, ctm);
    if !polygons.is_empty() {
        dl.ops.push(PaintOp {
            polygons,
            rule: FillRule::NonZero,
            color,
            clip: Some(clip),
        });
    }
}
