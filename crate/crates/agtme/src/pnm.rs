//! Binary netpbm reading and writing: PGM (P5) for grayscale and masks,
//! PPM (P6) for color. Only maxval 255 is supported, so samples are single
//! bytes and round-trips are bit-exact.
//!
//! The reader accepts any whitespace run and `#` comment lines in the
//! header; the writer emits one canonical header form (`P5\n<w> <h>\n255\n`),
//! so `write(read(x))` normalizes and `read(write(img))` is the identity.

use std::path::Path;

use crate::color::ColorImage;
use crate::error::{Error, Result};
use crate::image::{GrayImage, MaskImage};

/// A decoded netpbm file: P5 becomes gray, P6 becomes color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Image {
    Gray(GrayImage),
    Color(ColorImage),
}

impl Image {
    pub fn width(&self) -> u32 {
        match self {
            Image::Gray(g) => g.width(),
            Image::Color(c) => c.width(),
        }
    }

    pub fn height(&self) -> u32 {
        match self {
            Image::Gray(g) => g.height(),
            Image::Color(c) => c.height(),
        }
    }
}

/// Reads a binary PGM/PPM file.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_image(&bytes)
}

/// Reads a P5 file as a mask: nonzero level means included.
pub fn read_mask(path: impl AsRef<Path>) -> Result<MaskImage> {
    match read_image(path)? {
        Image::Gray(g) => Ok(MaskImage::from_levels(&g)),
        Image::Color(_) => Err(Error::parse(0, "mask must be a grayscale P5 file")),
    }
}

/// Writes a gray or color image with the canonical header.
pub fn write_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_image(image);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_gray(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    write_image(&Image::Gray(image.clone()), path)
}

pub fn write_color(image: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    write_image(&Image::Color(image.clone()), path)
}

/// Serializes to the canonical byte form.
pub fn encode_image(image: &Image) -> Vec<u8> {
    let (magic, width, height) = match image {
        Image::Gray(g) => ("P5", g.width(), g.height()),
        Image::Color(c) => ("P6", c.width(), c.height()),
    };
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    match image {
        Image::Gray(g) => out.extend_from_slice(g.levels()),
        Image::Color(c) => {
            for i in 0..c.len() {
                out.extend_from_slice(&c.pixel(i));
            }
        }
    }
    out
}

/// Parses binary PGM/PPM bytes. Errors carry the byte offset of the fault.
pub fn parse_image(bytes: &[u8]) -> Result<Image> {
    let mut cursor = Cursor::new(bytes);
    let magic = cursor.take(2)?;
    let channels = match magic {
        b"P5" => 1usize,
        b"P6" => 3usize,
        _ => {
            return Err(Error::parse(
                0,
                "expected binary netpbm magic \"P5\" or \"P6\"",
            ))
        }
    };

    cursor.skip_header_filler()?;
    let width = cursor.header_number("width")?;
    cursor.skip_header_filler()?;
    let height = cursor.header_number("height")?;
    let maxval_at = cursor.skip_header_filler()?;
    let maxval = cursor.header_number("maxval")?;
    if maxval != 255 {
        return Err(Error::parse(maxval_at, format!("unsupported maxval {maxval}")));
    }
    cursor.single_whitespace()?;

    let expected = width as usize * height as usize * channels;
    let offset = cursor.pos;
    let payload = cursor.rest();
    if payload.len() < expected {
        return Err(Error::parse(
            offset + payload.len(),
            format!(
                "payload truncated: expected {expected} sample bytes, found {}",
                payload.len()
            ),
        ));
    }
    if payload.len() > expected {
        return Err(Error::parse(
            offset + expected,
            format!("{} trailing bytes after payload", payload.len() - expected),
        ));
    }

    if channels == 1 {
        Ok(Image::Gray(GrayImage::new(width, height, payload.to_vec())?))
    } else {
        let mut planes = [
            Vec::with_capacity(expected / 3),
            Vec::with_capacity(expected / 3),
            Vec::with_capacity(expected / 3),
        ];
        for px in payload.chunks_exact(3) {
            planes[0].push(px[0]);
            planes[1].push(px[1]);
            planes[2].push(px[2]);
        }
        Ok(Image::Color(ColorImage::new(width, height, planes)?))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::parse(self.bytes.len(), "unexpected end of file"));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace runs and `#` comment lines; at least one whitespace
    /// byte must separate header tokens. Returns the position after skipping.
    fn skip_header_filler(&mut self) -> Result<usize> {
        let mut skipped = false;
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.pos += 1;
                    skipped = true;
                }
                Some(b'#') if skipped => {
                    while let Some(b) = self.peek() {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        if !skipped {
            return Err(Error::parse(self.pos, "expected whitespace between header fields"));
        }
        Ok(self.pos)
    }

    fn header_number(&mut self, field: &'static str) -> Result<u32> {
        let start = self.pos;
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                value = value * 10 + (b - b'0') as u64;
                if value > u32::MAX as u64 {
                    return Err(Error::parse(start, format!("{field} out of range")));
                }
                self.pos += 1;
                digits += 1;
            } else {
                break;
            }
        }
        if digits == 0 {
            return Err(Error::parse(self.pos, format!("expected {field} digits")));
        }
        Ok(value as u32)
    }

    /// Exactly one whitespace byte separates the maxval from the payload.
    fn single_whitespace(&mut self) -> Result<()> {
        match self.peek() {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::parse(self.pos, "expected single whitespace before payload")),
        }
    }
}
