//! NetPBM graymap (PGM) reading and writing, plus deterministic synthetic
//! test images.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::codec::Image;
use crate::error::{Error, Result};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("not a PGM file (bad magic)")]
    BadMagic,
    #[error("unsupported NetPBM format {0} (only P2 and P5 graymaps are read)")]
    UnsupportedFormat(String),
    #[error("invalid PGM header: {0}")]
    InvalidHeader(String),
    #[error("maxval {0} exceeds 255 (16-bit graymaps are not supported)")]
    MaxvalTooLarge(u32),
    #[error("image dimensions {width}x{height} overflow")]
    DimensionOverflow { width: u32, height: u32 },
    #[error("PGM raster truncated: expected {expected} samples, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("invalid sample in raster: {0}")]
    InvalidSample(String),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
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

    /// Reads one unsigned decimal token. `None` at end of input.
    fn number(&mut self, what: &str) -> Result<Option<u32>, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or_else(|| PgmError::InvalidHeader(format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return match self.bytes.get(self.pos) {
                None => Ok(None),
                Some(&b) => Err(PgmError::InvalidHeader(format!(
                    "expected {what}, found byte 0x{b:02x}"
                ))),
            };
        }
        match self.bytes.get(self.pos) {
            Some(b) if !b.is_ascii_whitespace() && *b != b'#' => Err(PgmError::InvalidHeader(
                format!("{what} followed by unexpected byte 0x{b:02x}"),
            )),
            _ => Ok(Some(value)),
        }
    }

    fn header_field(&mut self, what: &str) -> Result<u32, PgmError> {
        self.number(what)?
            .ok_or_else(|| PgmError::InvalidHeader(format!("missing {what}")))
    }
}

/// Parses a binary (P5) or ASCII (P2) graymap with maxval ≤ 255.
///
/// Samples are kept as stored; a maxval below 255 is not rescaled.
pub fn read_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        Some([b'P', d]) if d.is_ascii_digit() => {
            return Err(PgmError::UnsupportedFormat(format!("P{}", *d as char)))
        }
        _ => return Err(PgmError::BadMagic),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(cur.pos)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::InvalidHeader(
            "missing whitespace after magic".into(),
        ));
    }
    let width = cur.header_field("width")?;
    let height = cur.header_field("height")?;
    let maxval = cur.header_field("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::InvalidHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(PgmError::InvalidHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    let count = (width as usize)
        .checked_mul(height as usize)
        .filter(|&n| n <= isize::MAX as usize)
        .ok_or(PgmError::DimensionOverflow { width, height })?;

    let pixels = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        let start = cur.pos + 1;
        let available = bytes.len().saturating_sub(start);
        if available < count {
            return Err(PgmError::Truncated {
                expected: count,
                actual: available,
            });
        }
        let raster = &bytes[start..start + count];
        if let Some(&bad) = raster.iter().find(|&&p| u32::from(p) > maxval) {
            return Err(PgmError::InvalidSample(format!(
                "{bad} exceeds maxval {maxval}"
            )));
        }
        raster.to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count.min(bytes.len()));
        while pixels.len() < count {
            let value = cur
                .number("sample")
                .map_err(|e| PgmError::InvalidSample(e.to_string()))?
                .ok_or(PgmError::Truncated {
                    expected: count,
                    actual: pixels.len(),
                })?;
            if value > maxval {
                return Err(PgmError::InvalidSample(format!(
                    "{value} exceeds maxval {maxval}"
                )));
            }
            pixels.push(value as u8);
        }
        pixels
    };
    Image::new(width, height, pixels).map_err(|e| PgmError::InvalidHeader(e.to_string()))
}

/// Canonical binary graymap: `"P5\n<w> <h>\n255\n"` followed by the raster.
pub fn write_pgm(image: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(image.pixels());
    out
}

/// Deterministic test patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Constant(u8),
    /// Horizontal ramp from 0 at the left edge to 255 at the right edge.
    Gradient,
    /// Alternating 0/255 squares of the given side, starting with 0.
    Checkerboard(u32),
    /// Distance from the centre, 0 there and 255 at the corners.
    Radial,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Constant(v) => write!(f, "constant={v}"),
            Pattern::Gradient => f.write_str("gradient"),
            Pattern::Checkerboard(cell) => write!(f, "checkerboard={cell}"),
            Pattern::Radial => f.write_str("radial"),
        }
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once('=') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::invalid(format!("invalid synthetic pattern {s:?}"));
        match (name, arg) {
            ("gradient", None) => Ok(Pattern::Gradient),
            ("radial", None) => Ok(Pattern::Radial),
            ("checkerboard", None) => Ok(Pattern::Checkerboard(8)),
            ("checkerboard", Some(a)) => {
                let cell: u32 = a.parse().map_err(|_| bad())?;
                if cell == 0 {
                    return Err(Error::invalid("checkerboard cell must be at least 1"));
                }
                Ok(Pattern::Checkerboard(cell))
            }
            ("constant", Some(a)) => a.parse().map(Pattern::Constant).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

pub fn generate_synthetic(pattern: Pattern, width: u32, height: u32) -> Result<Image> {
    match pattern {
        Pattern::Constant(v) => Image::filled(width, height, v),
        Pattern::Gradient => Image::from_fn(width, height, |x, _| {
            if width > 1 {
                (255 * u64::from(x) / u64::from(width - 1)) as u8
            } else {
                0
            }
        }),
        Pattern::Checkerboard(cell) => {
            if cell == 0 {
                return Err(Error::invalid("checkerboard cell must be at least 1"));
            }
            Image::from_fn(width, height, |x, y| {
                if (x / cell + y / cell) % 2 == 0 {
                    0
                } else {
                    255
                }
            })
        }
        Pattern::Radial => {
            let cx = f64::from(width - 1) / 2.0;
            let cy = f64::from(height.saturating_sub(1)) / 2.0;
            let reach = cx.hypot(cy);
            Image::from_fn(width, height, |x, y| {
                if reach == 0.0 {
                    return 0;
                }
                let d = (f64::from(x) - cx).hypot(f64::from(y) - cy);
                (255.0 * d / reach).round() as u8
            })
        }
    }
}

/// `pattern:WxH`, e.g. `gradient:512x512` or `checkerboard=4:64x32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SyntheticSpec {
    pub pattern: Pattern,
    pub width: u32,
    pub height: u32,
}

impl SyntheticSpec {
    pub fn generate(&self) -> Result<Image> {
        generate_synthetic(self.pattern, self.width, self.height)
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}x{}", self.pattern, self.width, self.height)
    }
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("expected pattern:WxH, got {s:?}"));
        let (pattern, dims) = s.rsplit_once(':').ok_or_else(bad)?;
        let (w, h) = dims.split_once('x').ok_or_else(bad)?;
        let width: u32 = w.parse().map_err(|_| bad())?;
        let height: u32 = h.parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "synthetic image {s:?} has a zero dimension"
            )));
        }
        Ok(Self {
            pattern: pattern.parse()?,
            width,
            height,
        })
    }
}
