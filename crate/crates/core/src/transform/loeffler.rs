//! Four-stage Loeffler 8-point DCT.
//!
//! Stage 1 folds the input into sums `s_k = x_k + x_{7-k}` and differences
//! `d_k = x_k - x_{7-k}`. The sums feed a 4-point DCT (the even half, split
//! again into even and odd parts with one 3π/8 rotation); the differences feed
//! the odd half, which rotates `(d0, d3)` by 3π/16 and `(d1, d2)` by π/16,
//! then runs two layers of butterflies. The last stage folds the √2 factors
//! and the orthonormal scale into one multiplication per output.
//!
//! The plane rotations go through a [`Rotator`], so the same dataflow serves
//! the exact transform and the CORDIC approximation. Gain picked up by the
//! rotator is divided out in the output scaling (forward) or the input scaling
//! (inverse), never per rotation.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use super::cordic::{CordicState, RotationSchedule};
use crate::error::{Error, Result};

/// The plane rotations used by the flow graph, forward and inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rotation {
    /// `(t2, t3)` of the even half, by -3π/8.
    Even,
    /// `(d0, d3)`, by 3π/16.
    OddOuter,
    /// `(d1, d2)`, by π/16.
    OddInner,
    EvenInverse,
    OddOuterInverse,
    OddInnerInverse,
}

impl Rotation {
    const ALL: [Rotation; 6] = [
        Rotation::Even,
        Rotation::OddOuter,
        Rotation::OddInner,
        Rotation::EvenInverse,
        Rotation::OddOuterInverse,
        Rotation::OddInnerInverse,
    ];

    pub(crate) fn angle(self) -> f64 {
        use std::f64::consts::PI;
        match self {
            Rotation::Even => -3.0 * PI / 8.0,
            Rotation::OddOuter => 3.0 * PI / 16.0,
            Rotation::OddInner => PI / 16.0,
            Rotation::EvenInverse => 3.0 * PI / 8.0,
            Rotation::OddOuterInverse => -3.0 * PI / 16.0,
            Rotation::OddInnerInverse => -PI / 16.0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

pub(crate) trait Rotator {
    /// Rotates `(x, y)` counter-clockwise by `rotation.angle()`, scaled by `gain()`.
    fn rotate(&self, rotation: Rotation, x: f64, y: f64) -> (f64, f64);
    fn gain(&self) -> f64;
}

// cos/sin of π/16, 3π/16 and 3π/8.
const C1: f64 = 0.980_785_280_403_230_4;
const S1: f64 = 0.195_090_322_016_128_25;
const C3: f64 = 0.831_469_612_302_545_2;
const S3: f64 = 0.555_570_233_019_602_2;
const C6: f64 = 0.382_683_432_365_089_8;
const S6: f64 = 0.923_879_532_511_286_7;

/// Plane rotations with exact trigonometric constants.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ExactRotator;

impl Rotator for ExactRotator {
    #[inline]
    fn rotate(&self, rotation: Rotation, x: f64, y: f64) -> (f64, f64) {
        let (c, s) = match rotation {
            Rotation::Even => (C6, -S6),
            Rotation::OddOuter => (C3, S3),
            Rotation::OddInner => (C1, S1),
            Rotation::EvenInverse => (C6, S6),
            Rotation::OddOuterInverse => (C3, -S3),
            Rotation::OddInnerInverse => (C1, -S1),
        };
        (x * c - y * s, x * s + y * c)
    }

    fn gain(&self) -> f64 {
        1.0
    }
}

/// Plane rotations by shift-and-add CORDIC with precomputed direction schedules.
#[derive(Debug, Clone)]
pub(crate) struct CordicRotator {
    state: CordicState,
    schedules: [RotationSchedule; 6],
}

impl CordicRotator {
    pub(crate) fn new(iterations: u32) -> Result<Self> {
        let state = CordicState::new(iterations)?;
        let mut schedules = Vec::with_capacity(6);
        for rotation in Rotation::ALL {
            schedules.push(state.schedule(rotation.angle())?);
        }
        let schedules = schedules.try_into().expect("six rotations");
        Ok(Self { state, schedules })
    }

    pub(crate) fn iterations(&self) -> u32 {
        self.state.iterations()
    }
}

impl Rotator for CordicRotator {
    #[inline]
    fn rotate(&self, rotation: Rotation, x: f64, y: f64) -> (f64, f64) {
        self.state
            .rotate_scheduled(self.schedules[rotation.index()], x, y)
    }

    fn gain(&self) -> f64 {
        self.state.gain()
    }
}

pub(crate) fn forward<R: Rotator>(x: &[f64; 8], rot: &R) -> [f64; 8] {
    // Stage 1
    let s0 = x[0] + x[7];
    let s1 = x[1] + x[6];
    let s2 = x[2] + x[5];
    let s3 = x[3] + x[4];
    let d0 = x[0] - x[7];
    let d1 = x[1] - x[6];
    let d2 = x[2] - x[5];
    let d3 = x[3] - x[4];

    // Stage 2, even half: 4-point butterflies.
    let t0 = s0 + s3;
    let t3 = s0 - s3;
    let t1 = s1 + s2;
    let t2 = s1 - s2;
    // Stage 2, odd half: rotation blocks.
    let (p0, p3) = rot.rotate(Rotation::OddOuter, d0, d3);
    let (p1, p2) = rot.rotate(Rotation::OddInner, d1, d2);

    // Stage 3
    let y0 = t0 + t1;
    let y4 = t0 - t1;
    let (y2, y6) = rot.rotate(Rotation::Even, t2, t3);
    let q0 = p0 + p2;
    let q2 = p0 - p2;
    let q3 = p3 + p1;
    let q1 = p3 - p1;

    // Stage 4
    let y1 = q0 + q3;
    let y7 = q0 - q3;

    let g = rot.gain().recip();
    let half = 0.5 * g;
    let half_rsqrt2 = 0.5 * FRAC_1_SQRT_2 * g;
    let dc = 0.5 * FRAC_1_SQRT_2;
    [
        y0 * dc,
        y1 * half_rsqrt2,
        y2 * half,
        q2 * half,
        y4 * dc,
        q1 * half,
        y6 * half,
        y7 * half_rsqrt2,
    ]
}

pub(crate) fn inverse<R: Rotator>(f: &[f64; 8], rot: &R) -> [f64; 8] {
    let g = rot.gain().recip();

    // Stage 4 reversed, with the output scaling undone up front.
    let t0 = SQRT_2 * (f[0] + f[4]);
    let t1 = SQRT_2 * (f[0] - f[4]);
    let a1 = SQRT_2 * g * f[1];
    let a7 = SQRT_2 * g * f[7];
    let q0 = a1 + a7;
    let q3 = a1 - a7;
    let q2 = 2.0 * g * f[3];
    let q1 = 2.0 * g * f[5];

    // Stage 3 reversed.
    let (t2, t3) = rot.rotate(Rotation::EvenInverse, 2.0 * g * f[2], 2.0 * g * f[6]);
    let p0 = 0.5 * (q0 + q2);
    let p2 = 0.5 * (q0 - q2);
    let p3 = 0.5 * (q3 + q1);
    let p1 = 0.5 * (q3 - q1);

    // Stage 2 reversed.
    let s0 = 0.5 * (t0 + t3);
    let s3 = 0.5 * (t0 - t3);
    let s1 = 0.5 * (t1 + t2);
    let s2 = 0.5 * (t1 - t2);
    let (d0, d3) = rot.rotate(Rotation::OddOuterInverse, p0, p3);
    let (d1, d2) = rot.rotate(Rotation::OddInnerInverse, p1, p2);

    // Stage 1 reversed.
    [
        0.5 * (s0 + d0),
        0.5 * (s1 + d1),
        0.5 * (s2 + d2),
        0.5 * (s3 + d3),
        0.5 * (s3 - d3),
        0.5 * (s2 - d2),
        0.5 * (s1 - d1),
        0.5 * (s0 - d0),
    ]
}

fn check_vector(input: &[f64; 8]) -> Result<()> {
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(
            "8-point DCT input contains non-finite values",
        ));
    }
    Ok(())
}

/// Exact 8-point orthonormal DCT-II via the Loeffler factorization.
pub fn dct8_loeffler(input: &[f64; 8]) -> Result<[f64; 8]> {
    check_vector(input)?;
    Ok(forward(input, &ExactRotator))
}

/// Inverse of [`dct8_loeffler`].
pub fn idct8_loeffler(coeffs: &[f64; 8]) -> Result<[f64; 8]> {
    check_vector(coeffs)?;
    Ok(inverse(coeffs, &ExactRotator))
}

/// Loeffler DCT with every rotation computed by `iterations` CORDIC steps.
pub fn dct8_cordic_loeffler(input: &[f64; 8], iterations: u32) -> Result<[f64; 8]> {
    let rot = CordicRotator::new(iterations)?;
    check_vector(input)?;
    Ok(forward(input, &rot))
}

/// Inverse of [`dct8_cordic_loeffler`], using CORDIC for the inverse rotations.
pub fn idct8_cordic_loeffler(coeffs: &[f64; 8], iterations: u32) -> Result<[f64; 8]> {
    let rot = CordicRotator::new(iterations)?;
    check_vector(coeffs)?;
    Ok(inverse(coeffs, &rot))
}
