//! Circular-mode CORDIC in rotation mode.
//!
//! Each micro-rotation turns the vector by `±atan(2^-i)` using only additions
//! and multiplications by powers of two:
//!
//! ```text
//! x' = x - σ·y·2^-i
//! y' = y + σ·x·2^-i
//! z' = z - σ·atan(2^-i)
//! ```
//!
//! with `σ` the sign of the residual angle `z`. After `n` steps the vector has
//! been scaled by the cumulative gain `K(n) = Π √(1 + 2^-2i)`, which callers
//! compensate with a single multiplication.

use crate::error::{Error, Result};

/// Largest supported micro-rotation count.
pub const MAX_ITERATIONS: u32 = 32;

/// `Σ atan(2^-i)` for `i ≥ 0`: the largest angle a CORDIC rotation can reach.
pub const CONVERGENCE_LIMIT: f64 = 1.743_286_620_472_34;

/// Precomputed micro-rotation angles and gain for a fixed iteration count.
#[derive(Debug, Clone, PartialEq)]
pub struct CordicState {
    angle_table: Vec<f64>,
    shifts: Vec<f64>,
    gain: f64,
}

/// Direction sequence for one fixed angle. Bit `i` set means `σ_i = -1`.
///
/// In rotation mode the `σ` sequence depends only on the target angle, so
/// rotations by a constant angle can skip the angle accumulator entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationSchedule {
    negative: u32,
    iterations: u32,
}

impl CordicState {
    pub fn new(iterations: u32) -> Result<Self> {
        validate_iterations(iterations)?;
        let angle_table: Vec<f64> = (0..iterations)
            .map(|i| (-(i as f64)).exp2().atan())
            .collect();
        let shifts: Vec<f64> = (0..iterations).map(|i| (-(i as f64)).exp2()).collect();
        let gain = shifts.iter().map(|s| (1.0 + s * s).sqrt()).product();
        Ok(Self {
            angle_table,
            shifts,
            gain,
        })
    }

    pub fn iterations(&self) -> u32 {
        self.angle_table.len() as u32
    }

    /// Reference angles `atan(2^-i)` in radians, strictly decreasing.
    pub fn angle_table(&self) -> &[f64] {
        &self.angle_table
    }

    /// Cumulative scale factor `K(n)` picked up by an uncompensated rotation.
    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Resolves the micro-rotation directions for `angle`.
    pub fn schedule(&self, angle: f64) -> Result<RotationSchedule> {
        check_angle(angle)?;
        let mut residual = angle;
        let mut negative = 0u32;
        for (i, &step) in self.angle_table.iter().enumerate() {
            if residual >= 0.0 {
                residual -= step;
            } else {
                negative |= 1 << i;
                residual += step;
            }
        }
        Ok(RotationSchedule {
            negative,
            iterations: self.iterations(),
        })
    }

    /// Applies a precomputed schedule. The result carries the gain `K(n)`.
    #[inline]
    pub fn rotate_scheduled(&self, schedule: RotationSchedule, x: f64, y: f64) -> (f64, f64) {
        debug_assert_eq!(schedule.iterations, self.iterations());
        let (mut x, mut y) = (x, y);
        for (i, &shift) in self.shifts.iter().enumerate() {
            let dx = y * shift;
            let dy = x * shift;
            if schedule.negative & (1 << i) == 0 {
                x -= dx;
                y += dy;
            } else {
                x += dx;
                y -= dy;
            }
        }
        (x, y)
    }

    /// Rotates `(x, y)` by `angle` without gain compensation.
    pub fn rotate_raw(&self, x: f64, y: f64, angle: f64) -> Result<(f64, f64)> {
        check_finite(x, y)?;
        let schedule = self.schedule(angle)?;
        Ok(self.rotate_scheduled(schedule, x, y))
    }

    /// Rotates `(x, y)` by `angle` and divides out the gain.
    pub fn rotate(&self, x: f64, y: f64, angle: f64) -> Result<(f64, f64)> {
        let (x, y) = self.rotate_raw(x, y, angle)?;
        let inv = self.gain.recip();
        Ok((x * inv, y * inv))
    }
}

/// Gain-compensated CORDIC rotation of `(x, y)` by `angle` radians.
///
/// The result lies within `2^-(n-1)·|(x, y)|` of the exact rotation per
/// component.
pub fn cordic_rotate(x: f64, y: f64, angle: f64, iterations: u32) -> Result<(f64, f64)> {
    CordicState::new(iterations)?.rotate(x, y, angle)
}

pub(crate) fn validate_iterations(iterations: u32) -> Result<()> {
    if !(1..=MAX_ITERATIONS).contains(&iterations) {
        return Err(Error::invalid(format!(
            "CORDIC iterations must be in [1, {MAX_ITERATIONS}], got {iterations}"
        )));
    }
    Ok(())
}

fn check_angle(angle: f64) -> Result<()> {
    if !angle.is_finite() || angle.abs() > CONVERGENCE_LIMIT {
        return Err(Error::invalid(format!(
            "rotation angle {angle} outside CORDIC convergence range ±{CONVERGENCE_LIMIT:.4}"
        )));
    }
    Ok(())
}

fn check_finite(x: f64, y: f64) -> Result<()> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::invalid("non-finite CORDIC operand"));
    }
    Ok(())
}
