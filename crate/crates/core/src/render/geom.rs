//! Affine transforms, curve flattening and stroke outlines.
//!
//! Trigonometry goes through `libm` so results do not depend on the
//! platform's math library.

use std::f64::consts::PI;

use crate::parser::values::PathSeg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    fn len(self) -> f64 {
        libm::hypot(self.x, self.y)
    }
}

/// Axis-aligned rectangle, `x0 <= x1`, `y0 <= y1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Rect> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in it {
            r.x0 = r.x0.min(p.x);
            r.y0 = r.y0.min(p.y);
            r.x1 = r.x1.max(p.x);
            r.y1 = r.y1.max(p.y);
        }
        Some(r)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn union(&self, o: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(o.x0),
            y0: self.y0.min(o.y0),
            x1: self.x1.max(o.x1),
            y1: self.y1.max(o.y1),
        }
    }

    pub fn intersect(&self, o: &Rect) -> Option<Rect> {
        let r = Rect {
            x0: self.x0.max(o.x0),
            y0: self.y0.max(o.y0),
            x1: self.x1.min(o.x1),
            y1: self.y1.min(o.y1),
        };
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }

    pub fn inflate(&self, d: f64) -> Rect {
        Rect {
            x0: self.x0 - d,
            y0: self.y0 - d,
            x1: self.x1 + d,
            y1: self.y1 + d,
        }
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x1, self.y1),
            Point::new(self.x0, self.y1),
        ]
    }
}

/// `[a c e; b d f]` mapping `(x, y)` to `(a x + c y + e, b x + d y + f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        e: 0.0,
        f: 0.0,
    };

    pub fn translate(tx: f64, ty: f64) -> Self {
        Affine {
            e: tx,
            f: ty,
            ..Self::IDENTITY
        }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine {
            a: sx,
            d: sy,
            ..Self::IDENTITY
        }
    }

    pub fn rotate_degrees(deg: f64) -> Self {
        let r = deg * PI / 180.0;
        let (s, c) = (libm::sin(r), libm::cos(r));
        Affine {
            a: c,
            b: s,
            c: -s,
            d: c,
            e: 0.0,
            f: 0.0,
        }
    }

    /// `self` applied after `inner`.
    pub fn then(&self, inner: &Affine) -> Affine {
        Affine {
            a: self.a * inner.a + self.c * inner.b,
            b: self.b * inner.a + self.d * inner.b,
            c: self.a * inner.c + self.c * inner.d,
            d: self.b * inner.c + self.d * inner.d,
            e: self.a * inner.e + self.c * inner.f + self.e,
            f: self.b * inner.e + self.d * inner.f + self.f,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a * p.x + self.c * p.y + self.e,
            self.b * p.x + self.d * p.y + self.f,
        )
    }

    /// Geometric-mean scale factor, used to size tolerances and strokes.
    pub fn mean_scale(&self) -> f64 {
        libm::sqrt((self.a * self.d - self.b * self.c).abs())
    }
}

/// Parses an SVG `transform` list. Unknown or malformed entries make the
/// whole list invalid.
pub fn parse_transform(text: &str) -> Option<Affine> {
    let mut out = Affine::IDENTITY;
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest.find('(')?;
        let close = rest.find(')')?;
        if close < open {
            return None;
        }
        let name = rest[..open].trim();
        let args = crate::parser::values::parse_number_list(&rest[open + 1..close])?;
        let t = match (name, args.as_slice()) {
            ("translate", &[x]) => Affine::translate(x, 0.0),
            ("translate", &[x, y]) => Affine::translate(x, y),
            ("scale", &[s]) => Affine::scale(s, s),
            ("scale", &[sx, sy]) => Affine::scale(sx, sy),
            ("rotate", &[a]) => Affine::rotate_degrees(a),
            ("rotate", &[a, cx, cy]) => Affine::translate(cx, cy)
                .then(&Affine::rotate_degrees(a))
                .then(&Affine::translate(-cx, -cy)),
            ("skewX", &[a]) => Affine {
                c: libm::tan(a * PI / 180.0),
                ..Affine::IDENTITY
            },
            ("skewY", &[a]) => Affine {
                b: libm::tan(a * PI / 180.0),
                ..Affine::IDENTITY
            },
            ("matrix", &[a, b, c, d, e, f]) => Affine { a, b, c, d, e, f },
            _ => return None,
        };
        out = out.then(&t);
        rest = rest[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Some(out)
}

/// A flattened subpath.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

/// Number of line segments used for a curve whose control polygon has
/// length `len` in device pixels.
fn segments_for(len: f64) -> usize {
    (libm::ceil(libm::sqrt(len.max(0.0)) * 3.0) as usize).clamp(4, 96)
}

#[allow(clippy::too_many_arguments)]
fn push_arc_center(
    out: &mut Vec<Point>,
    center: Point,
    rx: f64,
    ry: f64,
    phi: f64,
    theta0: f64,
    dtheta: f64,
    scale: f64,
) {
    let n = segments_for(rx.max(ry) * dtheta.abs() * scale);
    let (sp, cp) = (libm::sin(phi), libm::cos(phi));
    for i in 1..=n {
        let t = theta0 + dtheta * (i as f64) / (n as f64);
        let (st, ct) = (libm::sin(t), libm::cos(t));
        out.push(Point::new(
            center.x + rx * ct * cp - ry * st * sp,
            center.y + rx * ct * sp + ry * st * cp,
        ));
    }
}

/// Endpoint-parameterized elliptical arc, following the standard SVG
/// conversion to center form.
#[allow(clippy::too_many_arguments)]
fn push_arc(
    out: &mut Vec<Point>,
    from: Point,
    to: Point,
    rx: f64,
    ry: f64,
    rotation: f64,
    large_arc: bool,
    sweep: bool,
    scale: f64,
) {
    let (mut rx, mut ry) = (rx.abs(), ry.abs());
    if rx == 0.0 || ry == 0.0 || from == to {
        out.push(to);
        return;
    }
    let phi = rotation * PI / 180.0;
    let (sp, cp) = (libm::sin(phi), libm::cos(phi));
    let dx = (from.x - to.x) / 2.0;
    let dy = (from.y - to.y) / 2.0;
    let x1 = cp * dx + sp * dy;
    let y1 = -sp * dx + cp * dy;
    let lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
    if lambda > 1.0 {
        let k = libm::sqrt(lambda);
        rx *= k;
        ry *= k;
    }
    let num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
    let den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
    let mut coef = if den == 0.0 { 0.0 } else { libm::sqrt((num / den).max(0.0)) };
    if large_arc == sweep {
        coef = -coef;
    }
    let cx1 = coef * rx * y1 / ry;
    let cy1 = -coef * ry * x1 / rx;
    let center = Point::new(
        cp * cx1 - sp * cy1 + (from.x + to.x) / 2.0,
        sp * cx1 + cp * cy1 + (from.y + to.y) / 2.0,
    );
    let angle = |ux: f64, uy: f64, vx: f64, vy: f64| libm::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    let ux = (x1 - cx1) / rx;
    let uy = (y1 - cy1) / ry;
    let vx = (-x1 - cx1) / rx;
    let vy = (-y1 - cy1) / ry;
    let theta0 = angle(1.0, 0.0, ux, uy);
    let mut dtheta = angle(ux, uy, vx, vy);
    if !sweep && dtheta > 0.0 {
        dtheta -= 2.0 * PI;
    } else if sweep && dtheta < 0.0 {
        dtheta += 2.0 * PI;
    }
    push_arc_center(out, center, rx, ry, phi, theta0, dtheta, scale);
    if let Some(last) = out.last_mut() {
        *last = to;
    }
}

fn push_cubic(out: &mut Vec<Point>, p0: Point, c1: Point, c2: Point, p3: Point, scale: f64) {
    let len = (c1.sub(p0).len() + c2.sub(c1).len() + p3.sub(c2).len()) * scale;
    let n = segments_for(len);
    for i in 1..=n {
        let t = i as f64 / n as f64;
        let mt = 1.0 - t;
        let a = mt * mt * mt;
        let b = 3.0 * mt * mt * t;
        let c = 3.0 * mt * t * t;
        let d = t * t * t;
        out.push(Point::new(
            a * p0.x + b * c1.x + c * c2.x + d * p3.x,
            a * p0.y + b * c1.y + c * c2.y + d * p3.y,
        ));
    }
}

fn push_quad(out: &mut Vec<Point>, p0: Point, c: Point, p2: Point, scale: f64) {
    let len = (c.sub(p0).len() + p2.sub(c).len()) * scale;
    let n = segments_for(len);
    for i in 1..=n {
        let t = i as f64 / n as f64;
        let mt = 1.0 - t;
        out.push(Point::new(
            mt * mt * p0.x + 2.0 * mt * t * c.x + t * t * p2.x,
            mt * mt * p0.y + 2.0 * mt * t * c.y + t * t * p2.y,
        ));
    }
}

/// Flattens path segments into polylines in user space. `scale` is the
/// user-to-device scale used to pick curve subdivision.
pub fn flatten_path(segs: &[PathSeg], scale: f64) -> Vec<Polyline> {
    let mut out = Vec::new();
    let mut cur: Vec<Point> = Vec::new();
    let mut pos = Point::new(0.0, 0.0);
    let finish = |cur: &mut Vec<Point>, closed: bool, out: &mut Vec<Polyline>| {
        if !cur.is_empty() {
            out.push(Polyline {
                points: std::mem::take(cur),
                closed,
            });
        }
    };
    for seg in segs {
        match *seg {
            PathSeg::MoveTo(x, y) => {
                finish(&mut cur, false, &mut out);
                pos = Point::new(x, y);
                cur.push(pos);
            }
            PathSeg::LineTo(x, y) => {
                if cur.is_empty() {
                    cur.push(pos);
                }
                pos = Point::new(x, y);
                cur.push(pos);
            }
            PathSeg::CubicTo { c1, c2, to } => {
                if cur.is_empty() {
                    cur.push(pos);
                }
                let to = Point::new(to.0, to.1);
                push_cubic(&mut cur, pos, Point::new(c1.0, c1.1), Point::new(c2.0, c2.1), to, scale);
                pos = to;
            }
            PathSeg::QuadTo { c, to } => {
                if cur.is_empty() {
                    cur.push(pos);
                }
                let to = Point::new(to.0, to.1);
                push_quad(&mut cur, pos, Point::new(c.0, c.1), to, scale);
                pos = to;
            }
            PathSeg::ArcTo {
                rx,
                ry,
                rotation,
                large_arc,
                sweep,
                to,
            } => {
                if cur.is_empty() {
                    cur.push(pos);
                }
                let to = Point::new(to.0, to.1);
                push_arc(&mut cur, pos, to, rx, ry, rotation, large_arc, sweep, scale);
                pos = to;
            }
            PathSeg::Close => {
                let start = cur.first().copied();
                finish(&mut cur, true, &mut out);
                if let Some(start) = start {
                    pos = start;
                }
            }
        }
    }
    finish(&mut cur, false, &mut out);
    out
}

/// Full ellipse as a closed polygon.
pub fn ellipse(cx: f64, cy: f64, rx: f64, ry: f64, scale: f64) -> Polyline {
    let mut points = Vec::new();
    push_arc_center(&mut points, Point::new(cx, cy), rx, ry, 0.0, 0.0, 2.0 * PI, scale);
    points.pop();
    Polyline { points, closed: true }
}

/// Rectangle with optional rounded corners, as a closed polygon.
pub fn rounded_rect(x: f64, y: f64, w: f64, h: f64, rx: f64, ry: f64, scale: f64) -> Polyline {
    let rx = rx.clamp(0.0, w / 2.0);
    let ry = ry.clamp(0.0, h / 2.0);
    if rx == 0.0 || ry == 0.0 {
        return Polyline {
            points: Rect::new(x, y, x + w, y + h).corners().to_vec(),
            closed: true,
        };
    }
    let mut points = Vec::new();
    let corners = [
        (x + w - rx, y + ry, -PI / 2.0),
        (x + w - rx, y + h - ry, 0.0),
        (x + rx, y + h - ry, PI / 2.0),
        (x + rx, y + ry, PI),
    ];
    for (cx, cy, start) in corners {
        points.push(Point::new(
            cx + rx * libm::cos(start),
            cy + ry * libm::sin(start),
        ));
        push_arc_center(&mut points, Point::new(cx, cy), rx, ry, 0.0, start, PI / 2.0, scale);
    }
    Polyline { points, closed: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineCap {
    #[default]
    Butt,
    Round,
    Square,
}

fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        / 2.0
}

/// Reorients a polygon to positive signed area so overlapping pieces add up
/// under the nonzero rule.
fn positive(mut poly: Vec<Point>) -> Vec<Point> {
    if signed_area(&poly) < 0.0 {
        poly.reverse();
    }
    poly
}

fn disc(center: Point, r: f64, scale: f64) -> Vec<Point> {
    ellipse(center.x, center.y, r, r, scale).points
}

/// Splits a polyline into dash pieces following `pattern` (user units).
pub fn dash(line: &Polyline, pattern: &[f64]) -> Vec<Polyline> {
    let mut pts = line.points.clone();
    if line.closed {
        if let Some(&first) = pts.first() {
            pts.push(first);
        }
    }
    let total: f64 = pattern.iter().sum();
    if pattern.is_empty() || total <= 0.0 || pattern.iter().any(|d| *d < 0.0) {
        return vec![line.clone()];
    }
    let mut out = Vec::new();
    let mut idx = 0;
    let mut remaining = pattern[0];
    let mut on = true;
    let mut current: Vec<Point> = pts.first().map(|p| vec![*p]).unwrap_or_default();
    for w in pts.windows(2) {
        let (mut a, b) = (w[0], w[1]);
        let mut seg_len = b.sub(a).len();
        while seg_len > 0.0 {
            if remaining >= seg_len {
                remaining -= seg_len;
                if on {
                    current.push(b);
                }
                seg_len = 0.0;
            } else {
                let t = remaining / seg_len;
                let mid = a.add(b.sub(a).scale(t));
                if on {
                    current.push(mid);
                    out.push(Polyline {
                        points: std::mem::take(&mut current),
                        closed: false,
                    });
                } else {
                    current = vec![mid];
                }
                seg_len -= remaining;
                on = !on;
                idx = (idx + 1) % pattern.len();
                remaining = pattern[idx];
                a = mid;
            }
        }
    }
    if on && current.len() > 1 {
        out.push(Polyline {
            points: current,
            closed: false,
        });
    }
    out
}

/// Outline polygons covering a stroke of `width` along `line`. Joins are
/// round; pieces overlap and must be filled with the nonzero rule.
pub fn stroke_outline(line: &Polyline, width: f64, cap: LineCap, scale: f64) -> Vec<Vec<Point>> {
    let hw = width / 2.0;
    let mut pts: Vec<Point> = Vec::with_capacity(line.points.len());
    for p in &line.points {
        if pts.last() != Some(p) {
            pts.push(*p);
        }
    }
    if line.closed && pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut out = Vec::new();
    if hw <= 0.0 || pts.is_empty() {
        return out;
    }
    if pts.len() == 1 {
        let p = pts[0];
        match cap {
            LineCap::Round => out.push(positive(disc(p, hw, scale))),
            LineCap::Square => out.push(Rect::new(p.x - hw, p.y - hw, p.x + hw, p.y + hw).corners().to_vec()),
            LineCap::Butt => {}
        }
        return out;
    }
    let n = pts.len();
    let seg_count = if line.closed { n } else { n - 1 };
    for i in 0..seg_count {
        let mut a = pts[i];
        let mut b = pts[(i + 1) % n];
        let d = b.sub(a);
        let len = d.len();
        let u = d.scale(1.0 / len);
        if !line.closed && cap == LineCap::Square {
            if i == 0 {
                a = a.sub(u.scale(hw));
            }
            if i == seg_count - 1 {
                b = b.add(u.scale(hw));
            }
        }
        let nrm = Point::new(-u.y * hw, u.x * hw);
        out.push(positive(vec![a.add(nrm), b.add(nrm), b.sub(nrm), a.sub(nrm)]));
    }
    let joins: Box<dyn Iterator<Item = usize>> = if line.closed {
        Box::new(0..n)
    } else {
        Box::new(1..n - 1)
    };
    for i in joins {
        out.push(positive(disc(pts[i], hw, scale)));
    }
    if !line.closed && cap == LineCap::Round {
        out.push(positive(disc(pts[0], hw, scale)));
        out.push(positive(disc(pts[n - 1], hw, scale)));
    }
    out
}
