//! Presentation properties: attribute and `style` declarations, with
//! inheritance from ancestor `svg`, `g` and HTML containers.

use crate::dom::NodeRef;
use crate::parser::values::{parse_length, parse_number, parse_number_list};

use super::color::{parse_color, parse_paint, Paint, Rgba};
use super::geom::LineCap;
use super::raster::FillRule;
use super::text::DEFAULT_FONT_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextAnchor {
    #[default]
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub fill: Paint,
    pub stroke: Paint,
    pub stroke_width: f64,
    pub fill_opacity: f64,
    pub stroke_opacity: f64,
    /// Product of `opacity` along the ancestor chain.
    pub opacity: f64,
    pub fill_rule: FillRule,
    pub dash: Vec<f64>,
    pub line_cap: LineCap,
    pub font_size: f64,
    pub bold: bool,
    pub anchor: TextAnchor,
    pub visible: bool,
    /// HTML text color.
    pub color: Rgba,
    pub background: Option<Rgba>,
    pub border_radius: Option<f64>,
    pub display_none: bool,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            fill: Paint::Color(Rgba::BLACK),
            stroke: Paint::None,
            stroke_width: 1.0,
            fill_opacity: 1.0,
            stroke_opacity: 1.0,
            opacity: 1.0,
            fill_rule: FillRule::NonZero,
            dash: Vec::new(),
            line_cap: LineCap::Butt,
            font_size: DEFAULT_FONT_SIZE,
            bold: false,
            anchor: TextAnchor::Start,
            visible: true,
            color: Rgba::BLACK,
            background: None,
            border_radius: None,
            display_none: false,
        }
    }
}

/// Splits a `style` attribute into `(property, value)` pairs.
pub fn declarations(style: &str) -> impl Iterator<Item = (&str, &str)> {
    style.split(';').filter_map(|decl| {
        let (k, v) = decl.split_once(':')?;
        let (k, v) = (k.trim(), v.trim());
        (!k.is_empty() && !v.is_empty()).then_some((k, v))
    })
}

fn opacity_value(v: &str) -> Option<f64> {
    parse_number(v.trim()).map(|o| o.clamp(0.0, 1.0))
}

impl Style {
    /// Style for `node`, inheriting from `self`.
    pub fn child(&self, node: &NodeRef<'_>) -> Style {
        let mut s = Style {
            opacity: self.opacity,
            background: None,
            border_radius: None,
            display_none: false,
            ..self.clone()
        };
        if node.tag() == "strong" {
            s.bold = true;
        }
        for (name, value) in node.attrs() {
            if name != "style" {
                s.set(name, value);
            }
        }
        if let Some(style) = node.attr("style") {
            for (name, value) in declarations(style) {
                s.set(name, value);
            }
        }
        s
    }

    fn set(&mut self, name: &str, value: &str) {
        match name {
            "fill" => {
                if let Some(p) = parse_paint(value) {
                    self.fill = p;
                }
            }
            "stroke" => {
                if let Some(p) = parse_paint(value) {
                    self.stroke = p;
                }
            }
            "stroke-width" => {
                if let Some(w) = parse_length(value).filter(|w| *w >= 0.0) {
                    self.stroke_width = w;
                }
            }
            "fill-opacity" => {
                if let Some(o) = opacity_value(value) {
                    self.fill_opacity = o;
                }
            }
            "stroke-opacity" => {
                if let Some(o) = opacity_value(value) {
                    self.stroke_opacity = o;
                }
            }
            "opacity" => {
                if let Some(o) = opacity_value(value) {
                    self.opacity *= o;
                }
            }
            "fill-rule" => match value.trim() {
                "evenodd" => self.fill_rule = FillRule::EvenOdd,
                "nonzero" => self.fill_rule = FillRule::NonZero,
                _ => {}
            },
            "stroke-dasharray" => {
                let v = value.trim();
                if v == "none" {
                    self.dash.clear();
                } else if let Some(list) = parse_number_list(&v.replace("px", "")) {
                    let mut list = list;
                    if list.len() % 2 == 1 {
                        list.extend_from_within(..);
                    }
                    self.dash = list;
                }
            }
            "stroke-linecap" => match value.trim() {
                "butt" => self.line_cap = LineCap::Butt,
                "round" => self.line_cap = LineCap::Round,
                "square" => self.line_cap = LineCap::Square,
                _ => {}
            },
            "font-size" => {
                if let Some(v) = parse_length(value).filter(|v| *v > 0.0) {
                    self.font_size = v;
                }
            }
            "font-weight" => match value.trim() {
                "bold" | "bolder" => self.bold = true,
                "normal" | "lighter" => self.bold = false,
                v => {
                    if let Some(w) = parse_number(v) {
                        self.bold = w >= 600.0;
                    }
                }
            },
            "text-anchor" => match value.trim() {
                "start" => self.anchor = TextAnchor::Start,
                "middle" => self.anchor = TextAnchor::Middle,
                "end" => self.anchor = TextAnchor::End,
                _ => {}
            },
            "visibility" => match value.trim() {
                "hidden" | "collapse" => self.visible = false,
                "visible" => self.visible = true,
                _ => {}
            },
            "display" => self.display_none = value.trim() == "none",
            "color" => {
                if let Some(c) = parse_color(value) {
                    self.color = c;
                }
            }
            "background" | "background-color" => {
                self.background = parse_color(value);
            }
            "border-radius" => {
                self.border_radius = parse_length(value).filter(|r| *r >= 0.0);
            }
            _ => {}
        }
    }

    pub fn fill_color(&self) -> Option<Rgba> {
        match self.fill {
            Paint::Color(c) if self.visible => Some(c.with_opacity(self.fill_opacity * self.opacity)),
            _ => None,
        }
    }

    pub fn stroke_color(&self) -> Option<Rgba> {
        match self.stroke {
            Paint::Color(c) if self.visible && self.stroke_width > 0.0 => {
                Some(c.with_opacity(self.stroke_opacity * self.opacity))
            }
            _ => None,
        }
    }

    pub fn text_color(&self) -> Rgba {
        self.color.with_opacity(self.opacity)
    }
}
