//! Mean squared error and peak signal-to-noise ratio between two images.

use std::fmt;

use crate::codec::Image;
use crate::error::{Error, Result};

/// Which peak value the PSNR is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Peak {
    /// Largest pixel value found in the original image.
    #[default]
    OriginalMax,
    Fixed(u8),
}

/// PSNR in decibels, or infinite when the images are identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn db(self) -> Option<f64> {
        match self {
            Psnr::Finite(v) => Some(v),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// Total order with `Infinite` above every finite value.
    pub fn cmp_db(self, other: Psnr) -> std::cmp::Ordering {
        match (self, other) {
            (Psnr::Infinite, Psnr::Infinite) => std::cmp::Ordering::Equal,
            (Psnr::Infinite, _) => std::cmp::Ordering::Greater,
            (_, Psnr::Infinite) => std::cmp::Ordering::Less,
            (Psnr::Finite(a), Psnr::Finite(b)) => a.total_cmp(&b),
        }
    }
}

/// Six fractional digits, or `inf`.
impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.6}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnrResult {
    pub mse: f64,
    pub psnr: Psnr,
    /// Peak value the ratio was computed against.
    pub max_value: u8,
}

fn check_dimensions(original: &Image, reconstructed: &Image) -> Result<()> {
    if !original.same_dimensions(reconstructed) {
        return Err(Error::invalid(format!(
            "image dimensions differ: {}x{} vs {}x{}",
            original.width(),
            original.height(),
            reconstructed.width(),
            reconstructed.height()
        )));
    }
    Ok(())
}

pub fn mse(original: &Image, reconstructed: &Image) -> Result<f64> {
    check_dimensions(original, reconstructed)?;
    let sum: u64 = original
        .pixels()
        .iter()
        .zip(reconstructed.pixels())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    Ok(sum as f64 / original.pixels().len() as f64)
}

/// `20·log10(MAX / √MSE)`.
///
/// An all-black original has a peak of 0; the peak is floored at 1 so the
/// ratio stays finite.
pub fn psnr(original: &Image, reconstructed: &Image, peak: Peak) -> Result<PsnrResult> {
    let mse = mse(original, reconstructed)?;
    let max_value = match peak {
        Peak::OriginalMax => original.pixels().iter().copied().max().unwrap_or(0),
        Peak::Fixed(v) => v,
    }
    .max(1);
    Ok(PsnrResult {
        mse,
        psnr: psnr_from_mse(mse, max_value),
        max_value,
    })
}

pub fn psnr_from_mse(mse: f64, max_value: u8) -> Psnr {
    if mse == 0.0 {
        Psnr::Infinite
    } else {
        Psnr::Finite(20.0 * (f64::from(max_value) / mse.sqrt()).log10())
    }
}
