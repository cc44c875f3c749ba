//! Block-based DCT image compression.
//!
//! The pipeline tiles a grayscale image into 8x8 blocks, level-shifts each
//! sample, applies a forward DCT, quantizes the coefficients with a JPEG-style
//! table and reverses the whole chain on decompression. Three transform
//! backends are available:
//!
//! * [`DctBackendId::NaiveDirect2D`]: the double-summation definition, used as
//!   the reference.
//! * [`DctBackendId::LoefflerSeparable`]: the four-stage Loeffler 8-point
//!   factorization applied to rows then columns.
//! * [`DctBackendId::CordicLoeffler`]: the same dataflow with every plane
//!   rotation computed by shift-and-add CORDIC micro-rotations.
//!
//! Around the codec sit PSNR/MSE metrics, a PGM reader/writer with synthetic
//! test patterns, and a benchmark harness that compares serial and
//! data-parallel execution.

pub mod bench;
pub mod codec;
mod error;
pub mod imageio;
pub mod metrics;
pub mod transform;

pub use codec::{
    compress_image, compress_image_with, decompress_image, decompress_image_with, roundtrip,
    roundtrip_with, CompressedImage, Execution, Image, QuantTable, QuantizedBlock,
};
pub use error::{Error, Result};
pub use transform::{dct2d, idct2d, Block, CoeffBlock, DctBackendId, Transform};
