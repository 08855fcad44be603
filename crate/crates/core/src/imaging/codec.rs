use std::io::Cursor;
use std::path::Path;

use super::{Image, ImageError};

/// Decodes a binary PPM (P6), PGM (P5), or 8-bit non-interlaced PNG stream.
///
/// Integer channel values `v` map to `v / 255`.
pub fn decode_image(bytes: &[u8]) -> Result<Image, ImageError> {
    match bytes {
        [b'P', b'5' | b'6', ..] => decode_pnm(bytes),
        [0x89, b'P', b'N', b'G', ..] => decode_png(bytes),
        _ => Err(ImageError::Decode("unrecognized image signature".into())),
    }
}

/// Reads and decodes an image file. The file stem becomes the image id.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let img = decode_image(&bytes)?;
    Ok(match path.file_stem() {
        Some(stem) => img.with_id(stem.to_string_lossy()),
        None => img,
    })
}

/// Encodes as canonical binary PNM: P5 for one channel, P6 for three, maxval 255,
/// header `P6\n<w> <h>\n255\n`.
pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| (v * 255.0).round() as u8));
    out
}

pub fn write_ppm(img: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let path = path.as_ref();
    std::fs::write(path, encode_ppm(img)).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::Decode(format!("missing {what} in PNM header")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::Decode(format!("invalid {what} in PNM header")))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<Image, ImageError> {
    let channels = if bytes[1] == b'5' { 1 } else { 3 };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::Unsupported(format!(
            "PNM maxval {maxval} (only 255 is supported)"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(ImageError::Decode("truncated PNM header".into())),
    }
    if width == 0 || height == 0 {
        return Err(ImageError::Decode("zero PNM dimension".into()));
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| ImageError::Decode("PNM dimensions overflow".into()))?;
    let raster = bytes
        .get(cur.pos..cur.pos + len)
        .ok_or_else(|| ImageError::Decode(format!("PNM raster shorter than {len} bytes")))?;
    let data = raster.iter().map(|&v| f64::from(v) / 255.0).collect();
    Ok(Image::from_parts_unchecked(width, height, channels, data))
}

fn decode_png(bytes: &[u8]) -> Result<Image, ImageError> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| ImageError::Decode(e.to_string()))?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::Unsupported(format!(
            "PNG bit depth {:?} (only 8-bit is supported)",
            info.bit_depth
        )));
    }
    if info.interlaced {
        return Err(ImageError::Unsupported("interlaced PNG".into()));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::Decode("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| ImageError::Decode(e.to_string()))?;
    let buf = &buf[..frame.buffer_size()];
    let (src_channels, channels) = match frame.color_type {
        png::ColorType::Grayscale => (1, 1),
        png::ColorType::GrayscaleAlpha => (2, 1),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (4, 3),
        png::ColorType::Indexed => {
            return Err(ImageError::Unsupported("unexpanded palette PNG".into()))
        }
    };
    // Alpha is dropped.
    let mut data = Vec::with_capacity(width * height * channels);
    for px in buf.chunks_exact(src_channels).take(width * height) {
        data.extend(px[..channels].iter().map(|&v| f64::from(v) / 255.0));
    }
    if data.len() != width * height * channels {
        return Err(ImageError::Decode("PNG frame shorter than declared".into()));
    }
    Ok(Image::from_parts_unchecked(width, height, channels, data))
}
