use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgba {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Rgba {
    pub const BLACK: Rgba = Rgba::rgb(0, 0, 0);
    pub const WHITE: Rgba = Rgba::rgb(255, 255, 255);
    pub const TRANSPARENT: Rgba = Rgba::new(0, 0, 0, 0);

    pub const fn new(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self { r, g, b, a }
    }

    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self::new(r, g, b, 255)
    }

    pub fn to_array(self) -> [u8; 4] {
        [self.r, self.g, self.b, self.a]
    }

    /// Scales alpha by `opacity` in [0, 1].
    pub fn with_opacity(self, opacity: f64) -> Self {
        let o = opacity.clamp(0.0, 1.0);
        let a = (f64::from(self.a) * o).round() as u8;
        Self { a, ..self }
    }
}

impl fmt::Display for Rgba {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)?;
        if self.a != 255 {
            write!(f, "{:02x}", self.a)?;
        }
        Ok(())
    }
}

/// A fill or stroke value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Paint {
    None,
    Color(Rgba),
}

const NAMED: &[(&str, Rgba)] = &[
    ("black", Rgba::rgb(0x00, 0x00, 0x00)),
    ("silver", Rgba::rgb(0xc0, 0xc0, 0xc0)),
    ("gray", Rgba::rgb(0x80, 0x80, 0x80)),
    ("white", Rgba::rgb(0xff, 0xff, 0xff)),
    ("maroon", Rgba::rgb(0x80, 0x00, 0x00)),
    ("red", Rgba::rgb(0xff, 0x00, 0x00)),
    ("purple", Rgba::rgb(0x80, 0x00, 0x80)),
    ("fuchsia", Rgba::rgb(0xff, 0x00, 0xff)),
    ("green", Rgba::rgb(0x00, 0x80, 0x00)),
    ("lime", Rgba::rgb(0x00, 0xff, 0x00)),
    ("olive", Rgba::rgb(0x80, 0x80, 0x00)),
    ("yellow", Rgba::rgb(0xff, 0xff, 0x00)),
    ("navy", Rgba::rgb(0x00, 0x00, 0x80)),
    ("blue", Rgba::rgb(0x00, 0x00, 0xff)),
    ("teal", Rgba::rgb(0x00, 0x80, 0x80)),
    ("aqua", Rgba::rgb(0x00, 0xff, 0xff)),
];

fn hex_digit(b: u8) -> Option<u8> {
    (b as char).to_digit(16).map(|d| d as u8)
}

/// Parses `#rrggbb`, `#rgb` or one of the 16 basic color names
/// (case-insensitive).
pub fn parse_color(text: &str) -> Option<Rgba> {
    let t = text.trim();
    if let Some(hex) = t.strip_prefix('#') {
        let digits: Option<Vec<u8>> = hex.bytes().map(hex_digit).collect();
        let d = digits?;
        return match *d.as_slice() {
            [r, g, b] => Some(Rgba::rgb(r * 17, g * 17, b * 17)),
            [r1, r2, g1, g2, b1, b2] => Some(Rgba::rgb(r1 * 16 + r2, g1 * 16 + g2, b1 * 16 + b2)),
            _ => None,
        };
    }
    NAMED
        .iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(t))
        .map(|(_, c)| *c)
}

/// Parses a paint value: a color, `none` or `transparent`.
pub fn parse_paint(text: &str) -> Option<Paint> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("none") || t.eq_ignore_ascii_case("transparent") {
        return Some(Paint::None);
    }
    parse_color(t).map(Paint::Color)
}
