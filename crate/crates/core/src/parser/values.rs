//! Grammars for the attribute values the renderer interprets: decimals,
//! point lists, view boxes and path data.

/// Scans one decimal number starting at `pos`. Returns the value and the
/// position after it.
fn scan_number(bytes: &[u8], mut pos: usize) -> Option<(f64, usize)> {
    let start = pos;
    if matches!(bytes.get(pos), Some(b'+' | b'-')) {
        pos += 1;
    }
    let int_start = pos;
    while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
        pos += 1;
    }
    let mut digits = pos - int_start;
    if bytes.get(pos) == Some(&b'.') {
        let frac_start = pos + 1;
        let mut p = frac_start;
        while bytes.get(p).is_some_and(u8::is_ascii_digit) {
            p += 1;
        }
        if p > frac_start || digits > 0 {
            digits += p - frac_start;
            pos = p;
        }
    }
    if digits == 0 {
        return None;
    }
    if matches!(bytes.get(pos), Some(b'e' | b'E')) {
        let mut p = pos + 1;
        if matches!(bytes.get(p), Some(b'+' | b'-')) {
            p += 1;
        }
        let exp_start = p;
        while bytes.get(p).is_some_and(u8::is_ascii_digit) {
            p += 1;
        }
        if p > exp_start {
            pos = p;
        }
    }
    let text = std::str::from_utf8(&bytes[start..pos]).ok()?;
    let value: f64 = text.parse().ok()?;
    value.is_finite().then_some((value, pos))
}

/// A complete finite decimal such as `12`, `-0.5` or `1e3`.
pub fn parse_number(text: &str) -> Option<f64> {
    let bytes = text.as_bytes();
    match scan_number(bytes, 0) {
        Some((v, end)) if end == bytes.len() => Some(v),
        _ => None,
    }
}

/// A decimal with optional surrounding whitespace and an optional `px` unit.
pub fn parse_length(text: &str) -> Option<f64> {
    let t = text.trim();
    parse_number(t.strip_suffix("px").unwrap_or(t))
}

fn skip_separators(bytes: &[u8], mut pos: usize) -> usize {
    let mut comma = false;
    while let Some(&b) = bytes.get(pos) {
        if b.is_ascii_whitespace() {
            pos += 1;
        } else if b == b',' && !comma {
            comma = true;
            pos += 1;
        } else {
            break;
        }
    }
    pos
}

/// Numbers separated by whitespace and/or single commas.
pub fn parse_number_list(text: &str) -> Option<Vec<f64>> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    while bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        pos += 1;
    }
    let mut out = Vec::new();
    while pos < bytes.len() {
        let (v, end) = scan_number(bytes, pos)?;
        out.push(v);
        pos = skip_separators(bytes, end);
        if pos == end && pos < bytes.len() && !matches!(bytes[pos], b'-' | b'+' | b'.') {
            return None;
        }
    }
    Some(out)
}

/// `points` attribute: an even count of numbers.
pub fn parse_points(text: &str) -> Option<Vec<(f64, f64)>> {
    let nums = parse_number_list(text)?;
    if nums.len() % 2 != 0 {
        return None;
    }
    Some(nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

/// `viewBox`: min-x, min-y, width, height with positive extent.
pub fn parse_view_box(text: &str) -> Option<[f64; 4]> {
    let nums = parse_number_list(text)?;
    match nums.as_slice() {
        &[x, y, w, h] if w > 0.0 && h > 0.0 => Some([x, y, w, h]),
        _ => None,
    }
}

/// One absolute path command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSeg {
    MoveTo(f64, f64),
    LineTo(f64, f64),
    CubicTo {
        c1: (f64, f64),
        c2: (f64, f64),
        to: (f64, f64),
    },
    QuadTo {
        c: (f64, f64),
        to: (f64, f64),
    },
    ArcTo {
        rx: f64,
        ry: f64,
        rotation: f64,
        large_arc: bool,
        sweep: bool,
        to: (f64, f64),
    },
    Close,
}

struct PathScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PathScanner<'_> {
    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn skip_sep(&mut self) {
        self.pos = skip_separators(self.bytes, self.pos);
    }

    fn number(&mut self) -> Result<f64, String> {
        self.skip_sep();
        let (v, end) = scan_number(self.bytes, self.pos)
            .ok_or_else(|| format!("expected a number at offset {}", self.pos))?;
        self.pos = end;
        Ok(v)
    }

    fn flag(&mut self) -> Result<bool, String> {
        self.skip_sep();
        let flag = match self.bytes.get(self.pos) {
            Some(b'0') => false,
            Some(b'1') => true,
            _ => return Err(format!("expected an arc flag at offset {}", self.pos)),
        };
        self.pos += 1;
        Ok(flag)
    }

    fn pair(&mut self) -> Result<(f64, f64), String> {
        Ok((self.number()?, self.number()?))
    }

    /// True when another number follows, i.e. an implicit command repeat.
    fn more_numbers(&mut self) -> bool {
        let save = self.pos;
        self.skip_sep();
        let more = matches!(
            self.bytes.get(self.pos),
            Some(b'0'..=b'9' | b'-' | b'+' | b'.')
        );
        self.pos = save;
        more
    }
}

/// Parses SVG path data into absolute segments.
pub fn parse_path(text: &str) -> Result<Vec<PathSeg>, String> {
    let mut s = PathScanner {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    let mut cur = (0.0, 0.0);
    let mut start = (0.0, 0.0);
    // Reflection sources for S/T.
    let mut last_cubic: Option<(f64, f64)> = None;
    let mut last_quad: Option<(f64, f64)> = None;
    s.skip_ws();
    if s.pos == s.bytes.len() {
        return Ok(out);
    }
    let mut first = true;
    loop {
        s.skip_ws();
        let Some(&cmd) = s.bytes.get(s.pos) else {
            break;
        };
        if !cmd.is_ascii_alphabetic() {
            return Err(format!("expected a path command at offset {}", s.pos));
        }
        if first && !matches!(cmd, b'M' | b'm') {
            return Err("path data must start with a moveto".into());
        }
        first = false;
        s.pos += 1;
        let rel = cmd.is_ascii_lowercase();
        let abs = |p: (f64, f64), cur: (f64, f64)| if rel { (p.0 + cur.0, p.1 + cur.1) } else { p };
        let mut repeat = false;
        loop {
            let upper = cmd.to_ascii_uppercase();
            let mut cubic_ctrl = None;
            let mut quad_ctrl = None;
            match upper {
                b'M' => {
                    let p = abs(s.pair()?, cur);
                    if repeat {
                        out.push(PathSeg::LineTo(p.0, p.1));
                    } else {
                        out.push(PathSeg::MoveTo(p.0, p.1));
                        start = p;
                    }
                    cur = p;
                }
                b'L' => {
                    let p = abs(s.pair()?, cur);
                    out.push(PathSeg::LineTo(p.0, p.1));
                    cur = p;
                }
                b'H' => {
                    let x = s.number()?;
                    cur = (if rel { cur.0 + x } else { x }, cur.1);
                    out.push(PathSeg::LineTo(cur.0, cur.1));
                }
                b'V' => {
                    let y = s.number()?;
                    cur = (cur.0, if rel { cur.1 + y } else { y });
                    out.push(PathSeg::LineTo(cur.0, cur.1));
                }
                b'C' => {
                    let c1 = abs(s.pair()?, cur);
                    let c2 = abs(s.pair()?, cur);
                    let to = abs(s.pair()?, cur);
                    out.push(PathSeg::CubicTo { c1, c2, to });
                    cubic_ctrl = Some(c2);
                    cur = to;
                }
                b'S' => {
                    let c1 = last_cubic.map_or(cur, |c| (2.0 * cur.0 - c.0, 2.0 * cur.1 - c.1));
                    let c2 = abs(s.pair()?, cur);
                    let to = abs(s.pair()?, cur);
                    out.push(PathSeg::CubicTo { c1, c2, to });
                    cubic_ctrl = Some(c2);
                    cur = to;
                }
                b'Q' => {
                    let c = abs(s.pair()?, cur);
                    let to = abs(s.pair()?, cur);
                    out.push(PathSeg::QuadTo { c, to });
                    quad_ctrl = Some(c);
                    cur = to;
                }
                b'T' => {
                    let c = last_quad.map_or(cur, |q| (2.0 * cur.0 - q.0, 2.0 * cur.1 - q.1));
                    let to = abs(s.pair()?, cur);
                    out.push(PathSeg::QuadTo { c, to });
                    quad_ctrl = Some(c);
                    cur = to;
                }
                b'A' => {
                    let rx = s.number()?;
                    let ry = s.number()?;
                    let rotation = s.number()?;
                    let large_arc = s.flag()?;
                    let sweep = s.flag()?;
                    let to = abs(s.pair()?, cur);
                    out.push(PathSeg::ArcTo {
                        rx,
                        ry,
                        rotation,
                        large_arc,
                        sweep,
                        to,
                    });
                    cur = to;
                }
                b'Z' => {
                    out.push(PathSeg::Close);
                    cur = start;
                }
                other => return Err(format!("unknown path command {:?}", other as char)),
            }
            last_cubic = cubic_ctrl;
            last_quad = quad_ctrl;
            if upper == b'Z' || !s.more_numbers() {
                break;
            }
            repeat = true;
        }
    }
    Ok(out)
}
