//! Binary PGM (P5) reading and writing, maxval 255 only.

use std::fmt;
use std::io::{self, Read, Write};

use crate::stencil::Image;

#[derive(Debug)]
pub enum PgmError {
    Io(io::Error),
    /// Magic number is not `P5`.
    BadMagic,
    /// Header field missing or not a number.
    BadHeader(String),
    /// Only maxval 255 is supported.
    UnsupportedMaxval(u64),
    /// Raster shorter than `width * height`.
    Truncated { expected: usize, actual: usize },
    ZeroDimension,
}

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgmError::Io(e) => write!(f, "i/o error: {e}"),
            PgmError::BadMagic => write!(f, "not a binary PGM (expected P5 magic)"),
            PgmError::BadHeader(msg) => write!(f, "malformed PGM header: {msg}"),
            PgmError::UnsupportedMaxval(v) => {
                write!(f, "unsupported maxval {v}; only 255 is accepted")
            }
            PgmError::Truncated { expected, actual } => {
                write!(f, "raster truncated: expected {expected} bytes, got {actual}")
            }
            PgmError::ZeroDimension => write!(f, "width and height must be positive"),
        }
    }
}

impl std::error::Error for PgmError {}

impl From<io::Error> for PgmError {
    fn from(e: io::Error) -> Self {
        PgmError::Io(e)
    }
}

/// Pulls the next whitespace-delimited header token, skipping `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_dim(token: Option<String>, what: &str) -> Result<usize, PgmError> {
    let token = token.ok_or_else(|| PgmError::BadHeader(format!("missing {what}")))?;
    token
        .parse::<usize>()
        .map_err(|_| PgmError::BadHeader(format!("bad {what} \"{token}\"")))
}

/// Reads a P5 image. Trailing bytes after the raster are ignored.
pub fn read_pgm<R: Read>(mut reader: R) -> Result<Image, PgmError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    match next_token(&bytes, &mut pos) {
        Some(magic) if magic == "P5" => {}
        _ => return Err(PgmError::BadMagic),
    }
    let width = parse_dim(next_token(&bytes, &mut pos), "width")?;
    let height = parse_dim(next_token(&bytes, &mut pos), "height")?;
    let maxval = parse_dim(next_token(&bytes, &mut pos), "maxval")? as u64;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension);
    }
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(PgmError::BadHeader("missing raster separator".into()));
    }
    pos += 1;
    let expected = width * height;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            actual: raster.len(),
        });
    }
    Image::new(width, height, raster[..expected].to_vec())
        .map_err(|_| PgmError::BadHeader("inconsistent dimensions".into()))
}

/// Writes a P5 image with maxval 255.
pub fn write_pgm<W: Write>(mut writer: W, image: &Image) -> io::Result<()> {
    write!(writer, "P5\n{} {}\n255\n", image.width(), image.height())?;
    writer.write_all(image.pixels())
}
