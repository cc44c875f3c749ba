//! Direct-summation DCT-II / DCT-III. These are the reference definitions the
//! fast paths are checked against.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

fn alpha(u: usize) -> f64 {
    if u == 0 {
        FRAC_1_SQRT_2
    } else {
        1.0
    }
}

fn check_signal(signal: &[f64]) -> Result<()> {
    if signal.is_empty() {
        return Err(Error::invalid("DCT input must have at least one sample"));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("DCT input contains non-finite values"));
    }
    Ok(())
}

/// Orthonormal 1-D DCT-II of arbitrary length:
/// `F(u) = √(2/N)·α(u)·Σ f(i)·cos(π·u·(2i+1)/(2N))`.
pub fn dct1d_direct(signal: &[f64]) -> Result<Vec<f64>> {
    check_signal(signal)?;
    let n = signal.len();
    let norm = (2.0 / n as f64).sqrt();
    Ok((0..n)
        .map(|u| {
            let sum: f64 = signal
                .iter()
                .enumerate()
                .map(|(i, &f)| f * (PI * u as f64 * (2 * i + 1) as f64 / (2 * n) as f64).cos())
                .sum();
            norm * alpha(u) * sum
        })
        .collect())
}

/// Inverse of [`dct1d_direct`] (the transposed orthonormal matrix).
pub fn idct1d_direct(coeffs: &[f64]) -> Result<Vec<f64>> {
    check_signal(coeffs)?;
    let n = coeffs.len();
    let norm = (2.0 / n as f64).sqrt();
    Ok((0..n)
        .map(|i| {
            let sum: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(u, &c)| {
                    alpha(u) * c * (PI * u as f64 * (2 * i + 1) as f64 / (2 * n) as f64).cos()
                })
                .sum();
            norm * sum
        })
        .collect())
}

/// `basis[u][i] = ½·α(u)·cos(π·u·(2i+1)/16)`, the 8-point orthonormal DCT matrix.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut m = [[0.0; 8]; 8];
        for (u, row) in m.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v = 0.5 * alpha(u) * (PI * u as f64 * (2 * i + 1) as f64 / 16.0).cos();
            }
        }
        m
    })
}

/// 2-D DCT of an 8x8 row-major block by the full double summation.
pub(crate) fn naive_forward_2d(block: &[f64; 64]) -> [f64; 64] {
    let c = basis();
    let mut out = [0.0; 64];
    for u in 0..8 {
        for v in 0..8 {
            let mut sum = 0.0;
            for i in 0..8 {
                for j in 0..8 {
                    sum += c[u][i] * c[v][j] * block[i * 8 + j];
                }
            }
            out[u * 8 + v] = sum;
        }
    }
    out
}

pub(crate) fn naive_inverse_2d(coeffs: &[f64; 64]) -> [f64; 64] {
    let c = basis();
    let mut out = [0.0; 64];
    for i in 0..8 {
        for j in 0..8 {
            let mut sum = 0.0;
            for u in 0..8 {
                for v in 0..8 {
                    sum += c[u][i] * c[v][j] * coeffs[u * 8 + v];
                }
            }
            out[i * 8 + j] = sum;
        }
    }
    out
}
