//! `.dcb` container for [`CompressedImage`].
//!
//! ```text
//! "DCB1"
//! u32 original_width, u32 original_height, u32 padded_width, u32 padded_height
//! u8 backend (0 naive, 1 loeffler, 2 cordic), u8 cordic iterations (0 if unused), u8 quality
//! blocks, row-major, each 64 x i16 in row-major coefficient order
//! ```
//!
//! All integers are little-endian.

use thiserror::Error;

use super::{CompressedImage, Geometry, QuantizedBlock};
use crate::transform::DctBackendId;

pub const MAGIC: &[u8; 4] = b"DCB1";
pub const HEADER_LEN: usize = 4 + 4 * 4 + 3;
const BLOCK_LEN: usize = 64 * 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DcbError {
    #[error("not a DCB file (bad magic)")]
    BadMagic,
    #[error("DCB file truncated: need {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("DCB file has {0} trailing bytes")]
    TrailingBytes(usize),
    #[error("invalid DCB header: {0}")]
    InvalidHeader(String),
}

fn backend_fields(backend: DctBackendId) -> (u8, u8) {
    match backend {
        DctBackendId::NaiveDirect2D => (0, 0),
        DctBackendId::LoefflerSeparable => (1, 0),
        DctBackendId::CordicLoeffler { iterations } => (2, iterations as u8),
    }
}

fn backend_from_fields(id: u8, iterations: u8) -> Result<DctBackendId, DcbError> {
    let invalid = |msg: String| Err(DcbError::InvalidHeader(msg));
    match (id, iterations) {
        (0, 0) => Ok(DctBackendId::NaiveDirect2D),
        (1, 0) => Ok(DctBackendId::LoefflerSeparable),
        (0 | 1, n) => invalid(format!("iterations must be 0 for backend {id}, got {n}")),
        (2, n) => {
            DctBackendId::cordic(u32::from(n)).map_err(|e| DcbError::InvalidHeader(e.to_string()))
        }
        (other, _) => invalid(format!("unknown backend id {other}")),
    }
}

pub fn write_dcb(image: &CompressedImage) -> Vec<u8> {
    let g = image.geometry();
    let mut out = Vec::with_capacity(HEADER_LEN + image.blocks().len() * BLOCK_LEN);
    out.extend_from_slice(MAGIC);
    for v in [g.width, g.height, g.padded_width, g.padded_height] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let (id, iterations) = backend_fields(image.backend());
    out.extend_from_slice(&[id, iterations, image.quality()]);
    for block in image.blocks() {
        for v in block.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_dcb(bytes: &[u8]) -> Result<CompressedImage, DcbError> {
    if bytes.len() < MAGIC.len() || &bytes[..4] != MAGIC {
        return Err(DcbError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(DcbError::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let u32_at = |offset: usize| u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap());
    let geometry = Geometry {
        width: u32_at(4),
        height: u32_at(8),
        padded_width: u32_at(12),
        padded_height: u32_at(16),
    };
    let expected = Geometry::for_size(geometry.width, geometry.height)
        .map_err(|e| DcbError::InvalidHeader(e.to_string()))?;
    if expected != geometry {
        return Err(DcbError::InvalidHeader(format!(
            "padded size {}x{} inconsistent with {}x{}",
            geometry.padded_width, geometry.padded_height, geometry.width, geometry.height
        )));
    }
    let backend = backend_from_fields(bytes[20], bytes[21])?;
    let quality = bytes[22];
    if !(1..=100).contains(&quality) {
        return Err(DcbError::InvalidHeader(format!(
            "quality {quality} outside [1, 100]"
        )));
    }

    let count = geometry.block_count();
    let total = count
        .checked_mul(BLOCK_LEN)
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| DcbError::InvalidHeader("block count overflows".into()))?;
    if bytes.len() < total {
        return Err(DcbError::Truncated {
            expected: total,
            actual: bytes.len(),
        });
    }
    if bytes.len() > total {
        return Err(DcbError::TrailingBytes(bytes.len() - total));
    }

    let blocks = bytes[HEADER_LEN..]
        .chunks_exact(BLOCK_LEN)
        .map(|chunk| {
            let mut values = [0i16; 64];
            for (v, pair) in values.iter_mut().zip(chunk.chunks_exact(2)) {
                *v = i16::from_le_bytes([pair[0], pair[1]]);
            }
            QuantizedBlock(values)
        })
        .collect();
    CompressedImage::new(geometry, backend, quality, blocks)
        .map_err(|e| DcbError::InvalidHeader(e.to_string()))
}
