use crate::error::{Error, Result};
use crate::transform::CoeffBlock;

/// Luminance quantization matrix from ITU-T T.81 Annex K.1, row-major.
pub const BASE_LUMINANCE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Largest magnitude a quantized coefficient is allowed to hold.
pub const QUANTIZED_MIN: i16 = -16384;
pub const QUANTIZED_MAX: i16 = 16383;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantTable {
    values: [u16; 64],
    quality: u8,
}

impl QuantTable {
    /// Scales the base table with the IJG quality formula. Quality 100 gives all ones.
    pub fn build(quality: u8) -> Result<Self> {
        validate_quality(quality)?;
        let q = u32::from(quality);
        let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
        let values = BASE_LUMINANCE.map(|entry| {
            let scaled = (u32::from(entry) * scale + 50) / 100;
            scaled.clamp(1, 255) as u16
        });
        Ok(Self { values, quality })
    }

    pub fn values(&self) -> &[u16; 64] {
        &self.values
    }

    pub fn quality(&self) -> u8 {
        self.quality
    }
}

pub(crate) fn validate_quality(quality: u8) -> Result<()> {
    if !(1..=100).contains(&quality) {
        return Err(Error::invalid(format!(
            "quality must be in [1, 100], got {quality}"
        )));
    }
    Ok(())
}

/// Quantizer output: one signed integer per coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantizedBlock(pub [i16; 64]);

impl QuantizedBlock {
    pub const ZERO: QuantizedBlock = QuantizedBlock([0; 64]);

    pub fn values(&self) -> &[i16; 64] {
        &self.0
    }
}

/// `round(F / Q)` with ties away from zero, saturated to the quantized range.
pub fn quantize(coeffs: &CoeffBlock, table: &QuantTable) -> QuantizedBlock {
    let mut out = [0i16; 64];
    for ((q, &f), &t) in out.iter_mut().zip(coeffs.values()).zip(&table.values) {
        let v = (f / f64::from(t)).round();
        *q = v.clamp(f64::from(QUANTIZED_MIN), f64::from(QUANTIZED_MAX)) as i16;
    }
    QuantizedBlock(out)
}

pub fn dequantize(q: &QuantizedBlock, table: &QuantTable) -> CoeffBlock {
    let mut out = [0.0; 64];
    for ((f, &v), &t) in out.iter_mut().zip(&q.0).zip(&table.values) {
        *f = f64::from(v) * f64::from(t);
    }
    CoeffBlock::from_finite(out)
}
