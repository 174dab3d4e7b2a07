//! RGBA8 raster buffers, PNG export and box-filter resampling.

use std::io::Cursor;

use super::color::Rgba;

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("png encoding failed: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("png decoding failed: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("unsupported png layout: {0}")]
    Layout(String),
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyTarget { width: u32, height: u32 },
}

/// Row-major RGBA8 image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    /// Supersampling factor the image was rendered with (1 for decoded or
    /// resampled images).
    pub dpi_scale: u32,
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 4);
        for _ in 0..width as usize * height as usize {
            pixels.extend_from_slice(&color.to_array());
        }
        Self {
            width,
            height,
            pixels,
            dpi_scale: 1,
        }
    }

    /// Wraps a raw buffer; `None` if its length does not match.
    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        (pixels.len() == width as usize * height as usize * 4).then_some(Self {
            width,
            height,
            pixels,
            dpi_scale: 1,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgba {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        Rgba::new(
            self.pixels[i],
            self.pixels[i + 1],
            self.pixels[i + 2],
            self.pixels[i + 3],
        )
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, color: Rgba) {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].copy_from_slice(&color.to_array());
    }

    /// Encodes as an 8-bit RGBA PNG with fixed compression settings, so equal
    /// pixels always give equal bytes.
    pub fn to_png(&self) -> Result<Vec<u8>, ImageError> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_color(png::ColorType::Rgba);
            encoder.set_depth(png::BitDepth::Eight);
            encoder.set_compression(png::Compression::Balanced);
            encoder.set_filter(png::Filter::Sub);
            let mut writer = encoder.write_header()?;
            writer.write_image_data(&self.pixels)?;
            writer.finish()?;
        }
        Ok(out)
    }

    /// Decodes an 8-bit RGB or RGBA PNG.
    pub fn from_png(bytes: &[u8]) -> Result<Self, ImageError> {
        let decoder = png::Decoder::new(Cursor::new(bytes));
        let mut reader = decoder.read_info()?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| ImageError::Layout("image too large".into()))?;
        let mut buf = vec![0; size];
        let info = reader.next_frame(&mut buf)?;
        if info.bit_depth != png::BitDepth::Eight {
            return Err(ImageError::Layout(format!("bit depth {:?}", info.bit_depth)));
        }
        let buf = &buf[..info.buffer_size()];
        let pixels = match info.color_type {
            png::ColorType::Rgba => buf.to_vec(),
            png::ColorType::Rgb => buf
                .chunks_exact(3)
                .flat_map(|c| [c[0], c[1], c[2], 255])
                .collect(),
            other => return Err(ImageError::Layout(format!("color type {other:?}"))),
        };
        Ok(Self {
            width: info.width,
            height: info.height,
            pixels,
            dpi_scale: 1,
        })
    }

    /// Per-channel mean over all pixels.
    pub fn channel_means(&self) -> [f64; 4] {
        let mut sums = [0u64; 4];
        for px in self.pixels.chunks_exact(4) {
            for c in 0..4 {
                sums[c] += u64::from(px[c]);
            }
        }
        let n = (self.width as u64 * self.height as u64).max(1) as f64;
        sums.map(|s| s as f64 / n)
    }
}

/// Area-weighted box filter. Every output pixel averages the source area it
/// covers, with exact integer weights and round-half-up.
pub fn downsample(img: &RasterImage, target_w: u32, target_h: u32) -> Result<RasterImage, ImageError> {
    if target_w == 0 || target_h == 0 {
        return Err(ImageError::EmptyTarget {
            width: target_w,
            height: target_h,
        });
    }
    if target_w == img.width && target_h == img.height {
        return Ok(img.clone());
    }
    let (sw, sh) = (u64::from(img.width), u64::from(img.height));
    let (tw, th) = (u64::from(target_w), u64::from(target_h));
    // In scaled units source pixel i spans [i*t, (i+1)*t) and target pixel x
    // spans [x*s, (x+1)*s); both axes use this common grid.
    let spans = |t: u64, s: u64| -> Vec<Vec<(usize, u64)>> {
        (0..t)
            .map(|x| {
                let (lo, hi) = (x * s, (x + 1) * s);
                let first = lo / t;
                let last = (hi - 1) / t;
                (first..=last)
                    .map(|i| {
                        let overlap = hi.min((i + 1) * t) - lo.max(i * t);
                        (i as usize, overlap)
                    })
                    .collect()
            })
            .collect()
    };
    let xs = spans(tw, sw);
    let ys = spans(th, sh);
    let total = sw * sh;
    let mut out = Vec::with_capacity((tw * th * 4) as usize);
    let stride = img.width as usize * 4;
    for ycov in &ys {
        for xcov in &xs {
            let mut acc = [0u64; 4];
            for &(sy, wy) in ycov {
                let row = &img.pixels[sy * stride..];
                for &(sx, wx) in xcov {
                    let w = wx * wy;
                    let px = &row[sx * 4..sx * 4 + 4];
                    for c in 0..4 {
                        acc[c] += w * u64::from(px[c]);
                    }
                }
            }
            for a in acc {
                out.push(((a + total / 2) / total) as u8);
            }
        }
    }
    Ok(RasterImage {
        width: target_w,
        height: target_h,
        pixels: out,
        dpi_scale: 1,
    })
}
