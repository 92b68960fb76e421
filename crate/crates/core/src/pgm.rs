//! Binary (P5) PGM reading and writing, restricted to square 8-bit images.
//!
//! The reader accepts `#` comments between header tokens; the writer emits a
//! canonical `P5\n<w> <h>\n<maxval>\n` header so write-then-read round-trips
//! bit-exactly.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("malformed PGM: {0}")]
    MalformedHeader(String),
    #[error("image is {width}x{height}; only square images are supported")]
    NonSquareImage { width: u32, height: u32 },
    #[error("maxval {0} unsupported; only 8-bit (maxval <= 255) PGM is handled")]
    UnsupportedMaxval(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image, PgmError> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &Image) -> Result<(), PgmError> {
    Ok(fs::write(path, encode_pgm(img)?)?)
}

/// Parse a binary P5 buffer into an [`Image`] with `L = maxval + 1`.
pub fn decode_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor.token()?;
    if magic != b"P5" {
        return Err(PgmError::MalformedHeader(format!(
            "magic {:?} is not binary P5 (ASCII P2 is unsupported)",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = cursor.number()?;
    let height = cursor.number()?;
    let maxval = cursor.number()?;
    cursor.single_whitespace()?;

    if width != height {
        return Err(PgmError::NonSquareImage { width, height });
    }
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let expected = width as usize * height as usize;
    let raster = &cursor.bytes[cursor.pos..];
    if raster.len() != expected {
        return Err(PgmError::MalformedHeader(format!(
            "raster holds {} bytes, expected {expected}",
            raster.len()
        )));
    }
    if let Some(&value) = raster.iter().find(|&&b| u32::from(b) > maxval) {
        return Err(PgmError::MalformedHeader(format!(
            "raster value {value} exceeds maxval {maxval}"
        )));
    }
    let pixels = raster.iter().map(|&b| u32::from(b)).collect();
    Image::new(width, maxval + 1, pixels).map_err(|e| PgmError::MalformedHeader(e.to_string()))
}

/// Serialize to a canonical binary P5 buffer; requires `L <= 256`.
pub fn encode_pgm(img: &Image) -> Result<Vec<u8>, PgmError> {
    if img.gray_levels() > 256 {
        return Err(PgmError::UnsupportedMaxval(img.gray_levels() - 1));
    }
    let n = img.n_side();
    let maxval = img.gray_levels() - 1;
    let mut out = format!("P5\n{n} {n}\n{maxval}\n").into_bytes();
    out.extend(img.pixels().iter().map(|&p| p as u8));
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace_and_comments(&mut self) -> Result<(), PgmError> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn token(&mut self) -> Result<&[u8], PgmError> {
        self.skip_whitespace_and_comments()?;
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::MalformedHeader("truncated header".into()));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Result<u32, PgmError> {
        let token = self.token()?;
        std::str::from_utf8(token)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                PgmError::MalformedHeader(format!(
                    "expected a number, found {:?}",
                    String::from_utf8_lossy(token)
                ))
            })
    }

    /// Exactly one whitespace byte separates maxval from the raster.
    fn single_whitespace(&mut self) -> Result<(), PgmError> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(PgmError::MalformedHeader(
                "missing whitespace between maxval and raster".into(),
            )),
        }
    }
}
