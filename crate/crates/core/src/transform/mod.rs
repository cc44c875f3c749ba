//! Forward and inverse 8x8 DCT backends.

mod cordic;
mod direct;
mod loeffler;

use std::fmt;
use std::str::FromStr;

pub use cordic::{cordic_rotate, CordicState, RotationSchedule, CONVERGENCE_LIMIT, MAX_ITERATIONS};
pub use direct::{dct1d_direct, idct1d_direct};
pub use loeffler::{dct8_cordic_loeffler, dct8_loeffler, idct8_cordic_loeffler, idct8_loeffler};

use crate::error::{Error, Result};
use loeffler::{CordicRotator, ExactRotator};

/// Default CORDIC micro-rotation count.
pub const DEFAULT_CORDIC_ITERATIONS: u32 = 12;

/// 8x8 spatial-domain samples, row-major, after level shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block([f64; 64]);

/// 8x8 orthonormal DCT coefficients, row-major, `(u, v)` = (vertical, horizontal) frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffBlock([f64; 64]);

macro_rules! block_common {
    ($ty:ident, $what:literal) => {
        impl $ty {
            pub const ZERO: $ty = $ty([0.0; 64]);

            /// Fails if any entry is NaN or infinite.
            pub fn new(values: [f64; 64]) -> Result<Self> {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(concat!(
                        $what,
                        " contains non-finite values"
                    )));
                }
                Ok(Self(values))
            }

            pub(crate) fn from_finite(values: [f64; 64]) -> Self {
                debug_assert!(values.iter().all(|v| v.is_finite()));
                Self(values)
            }

            pub fn values(&self) -> &[f64; 64] {
                &self.0
            }

            pub fn get(&self, row: usize, col: usize) -> f64 {
                self.0[row * 8 + col]
            }

            /// Sum of squared entries.
            pub fn energy(&self) -> f64 {
                self.0.iter().map(|v| v * v).sum()
            }
        }
    };
}

block_common!(Block, "block");
block_common!(CoeffBlock, "coefficient block");

/// Selects which transform implementation a pipeline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DctBackendId {
    NaiveDirect2D,
    LoefflerSeparable,
    CordicLoeffler { iterations: u32 },
}

impl DctBackendId {
    pub fn cordic(iterations: u32) -> Result<Self> {
        cordic::validate_iterations(iterations)?;
        Ok(DctBackendId::CordicLoeffler { iterations })
    }

    pub fn validate(self) -> Result<Self> {
        if let DctBackendId::CordicLoeffler { iterations } = self {
            cordic::validate_iterations(iterations)?;
        }
        Ok(self)
    }

    /// Exact backends reproduce the mathematical DCT up to rounding.
    pub fn is_exact(self) -> bool {
        !matches!(self, DctBackendId::CordicLoeffler { .. })
    }
}

impl fmt::Display for DctBackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DctBackendId::NaiveDirect2D => f.write_str("naive"),
            DctBackendId::LoefflerSeparable => f.write_str("loeffler"),
            DctBackendId::CordicLoeffler { iterations } => write!(f, "cordic:{iterations}"),
        }
    }
}

/// Accepts `naive`, `loeffler`, `cordic` (default iterations) and `cordic:N`.
impl FromStr for DctBackendId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "naive" => Ok(DctBackendId::NaiveDirect2D),
            "loeffler" => Ok(DctBackendId::LoefflerSeparable),
            "cordic" => DctBackendId::cordic(DEFAULT_CORDIC_ITERATIONS),
            other => {
                let iterations = other
                    .strip_prefix("cordic:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::invalid(format!(
                            "unknown backend {other:?} (expected naive, loeffler, cordic or cordic:N)"
                        ))
                    })?;
                DctBackendId::cordic(iterations)
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Naive,
    Loeffler,
    Cordic(CordicRotator),
}

/// A backend with its tables prepared, ready to transform many blocks.
#[derive(Debug, Clone)]
pub struct Transform {
    kernel: Kernel,
}

impl Transform {
    pub fn new(backend: DctBackendId) -> Result<Self> {
        let kernel = match backend.validate()? {
            DctBackendId::NaiveDirect2D => Kernel::Naive,
            DctBackendId::LoefflerSeparable => Kernel::Loeffler,
            DctBackendId::CordicLoeffler { iterations } => {
                Kernel::Cordic(CordicRotator::new(iterations)?)
            }
        };
        Ok(Self { kernel })
    }

    pub fn backend(&self) -> DctBackendId {
        match &self.kernel {
            Kernel::Naive => DctBackendId::NaiveDirect2D,
            Kernel::Loeffler => DctBackendId::LoefflerSeparable,
            Kernel::Cordic(rot) => DctBackendId::CordicLoeffler {
                iterations: rot.iterations(),
            },
        }
    }

    pub fn forward(&self, block: &Block) -> CoeffBlock {
        let out = match &self.kernel {
            Kernel::Naive => direct::naive_forward_2d(&block.0),
            Kernel::Loeffler => separable(&block.0, |v| loeffler::forward(v, &ExactRotator)),
            Kernel::Cordic(rot) => separable(&block.0, |v| loeffler::forward(v, rot)),
        };
        CoeffBlock::from_finite(out)
    }

    pub fn inverse(&self, coeffs: &CoeffBlock) -> Block {
        let out = match &self.kernel {
            Kernel::Naive => direct::naive_inverse_2d(&coeffs.0),
            Kernel::Loeffler => separable(&coeffs.0, |v| loeffler::inverse(v, &ExactRotator)),
            Kernel::Cordic(rot) => separable(&coeffs.0, |v| loeffler::inverse(v, rot)),
        };
        Block::from_finite(out)
    }
}

/// Applies an 8-point transform to every row, then every column.
#[inline]
fn separable(input: &[f64; 64], pass: impl Fn(&[f64; 8]) -> [f64; 8]) -> [f64; 64] {
    let mut rows = [0.0; 64];
    for (src, dst) in input.chunks_exact(8).zip(rows.chunks_exact_mut(8)) {
        let src: &[f64; 8] = src.try_into().unwrap();
        dst.copy_from_slice(&pass(src));
    }
    let mut out = [0.0; 64];
    for col in 0..8 {
        let column: [f64; 8] = std::array::from_fn(|row| rows[row * 8 + col]);
        for (row, v) in pass(&column).into_iter().enumerate() {
            out[row * 8 + col] = v;
        }
    }
    out
}

/// 2-D forward DCT of one block.
pub fn dct2d(block: &Block, backend: DctBackendId) -> Result<CoeffBlock> {
    Ok(Transform::new(backend)?.forward(block))
}

/// 2-D inverse DCT of one block.
pub fn idct2d(coeffs: &CoeffBlock, backend: DctBackendId) -> Result<Block> {
    Ok(Transform::new(backend)?.inverse(coeffs))
}
