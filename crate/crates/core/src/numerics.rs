//! Unit conventions, sampling grids and quadrature.
//!
//! Frequencies are wavenumbers in cm⁻¹ and times are in fs throughout the
//! crate. A phase `ω·t` is therefore `2π·c·ν̃·t` with `c` in cm/fs, and the
//! thermal exponent `ħω/k_BT` is `c₂·ν̃/T` with the second radiation constant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in cm/fs.
pub const SPEED_OF_LIGHT_CM_PER_FS: f64 = 2.997_924_58e-5;

/// Second radiation constant `hc/k_B` in cm·K.
pub const SECOND_RADIATION_CONSTANT: f64 = 1.438_776_9;

/// Angular frequency (rad/fs) of a wavenumber (cm⁻¹).
#[inline]
pub fn angular(wavenumber: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_CM_PER_FS * wavenumber
}

/// `sin(x)/x` with the removable singularity at zero.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() > 1e-4 {
        x.sin() / x
    } else {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Uniform {
    min: f64,
    max: f64,
    count: usize,
}

impl Uniform {
    fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite bounds [{min}, {max}]")));
        }
        if max <= min {
            return Err(Error::InvalidGrid(format!("max {max} must exceed min {min}")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("count {count} must be at least 2")));
        }
        Ok(Self { min, max, count })
    }

    fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

macro_rules! uniform_grid_accessors {
    () => {
        pub fn min(&self) -> f64 {
            self.0.min
        }

        pub fn max(&self) -> f64 {
            self.0.max
        }

        pub fn len(&self) -> usize {
            self.0.count
        }

        /// Always false; a valid grid holds at least two points.
        pub fn is_empty(&self) -> bool {
            false
        }

        pub fn step(&self) -> f64 {
            self.0.step()
        }

        /// The `i`-th point; the last index returns `max` exactly.
        pub fn point(&self, i: usize) -> f64 {
            self.0.point(i)
        }

        pub fn points(&self) -> Vec<f64> {
            self.0.points()
        }

        /// Composite trapezoid integral of complex samples taken on this grid.
        pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64> {
            if samples.len() != self.len() {
                return Err(Error::InvalidGrid(format!(
                    "{} samples on a grid of {} points",
                    samples.len(),
                    self.len()
                )));
            }
            trapezoid_integral(self.step(), samples)
        }

        /// Composite trapezoid integral of real samples taken on this grid.
        pub fn integrate_real(&self, samples: &[f64]) -> Result<f64> {
            if samples.len() != self.len() {
                return Err(Error::InvalidGrid(format!(
                    "{} samples on a grid of {} points",
                    samples.len(),
                    self.len()
                )));
            }
            trapezoid_integral_real(self.step(), samples)
        }

        /// Trapezoid weights `w_k` such that `Σ w_k f_k` is the composite rule.
        pub fn trapezoid_weights(&self) -> Vec<f64> {
            let h = self.step();
            let n = self.len();
            (0..n)
                .map(|i| if i == 0 || i + 1 == n { 0.5 * h } else { h })
                .collect()
        }
    };
}

/// Uniform wavenumber grid (cm⁻¹), endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid(Uniform);

impl FrequencyGrid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if min < 0.0 {
            return Err(Error::InvalidGrid(format!(
                "frequency grid starts at negative wavenumber {min}"
            )));
        }
        Uniform::new(min, max, count).map(Self)
    }

    uniform_grid_accessors!();
}

/// Uniform time grid (fs), endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid(Uniform);

impl TimeGrid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        Uniform::new(min, max, count).map(Self)
    }

    uniform_grid_accessors!();
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid_integral(step: f64, samples: &[Complex64]) -> Result<Complex64> {
    if samples.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "trapezoid rule needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let interior: Complex64 = samples[1..n - 1].iter().sum();
    Ok(step * (interior + 0.5 * (samples[0] + samples[n - 1])))
}

/// Real-valued counterpart of [`trapezoid_integral`].
pub fn trapezoid_integral_real(step: f64, samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "trapezoid rule needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let interior: f64 = samples[1..n - 1].iter().sum();
    Ok(step * (interior + 0.5 * (samples[0] + samples[n - 1])))
}

/// Running integral `∫_{t₀}^{t_k} e^{iΩτ} u(τ) dτ` for every grid point `t_k`,
/// with `u` interpolated linearly between samples and the exponential
/// integrated exactly on each interval.
///
/// `omega` is in rad/fs. The phase factor at each interval start is evaluated
/// directly from its time, never by recurrence.
pub fn cumulative_oscillatory_integral(
    times: &TimeGrid,
    envelope: &[Complex64],
    omega: f64,
) -> Result<Vec<Complex64>> {
    if envelope.len() != times.len() {
        return Err(Error::InvalidGrid(format!(
            "{} envelope samples on a grid of {} points",
            envelope.len(),
            times.len()
        )));
    }
    let h = times.step();
    let theta = omega * h;
    let (w0, w1) = filon_weights(theta);
    let mut out = Vec::with_capacity(envelope.len());
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for k in 0..envelope.len() - 1 {
        let a = times.point(k);
        let phase = Complex64::from_polar(1.0, omega * a);
        // ∫_0^1 e^{iθs}((1-s)u_a + s u_b) ds = u_a (φ₁ - φ₂) + u_b φ₂
        acc += h * phase * (envelope[k] * w0 + envelope[k + 1] * w1);
        out.push(acc);
    }
    Ok(out)
}

/// Weights `(φ₁ - φ₂, φ₂)` with `φ₁ = ∫₀¹ e^{iθs} ds`, `φ₂ = ∫₀¹ s e^{iθs} ds`.
fn filon_weights(theta: f64) -> (Complex64, Complex64) {
    let (phi1, phi2) = if theta.abs() < 1e-3 {
        let t = theta;
        let t2 = t * t;
        (
            Complex64::new(1.0 - t2 / 6.0 + t2 * t2 / 120.0, t / 2.0 - t * t2 / 24.0),
            Complex64::new(0.5 - t2 / 8.0 + t2 * t2 / 144.0, t / 3.0 - t * t2 / 30.0),
        )
    } else {
        let i = Complex64::i();
        let e = Complex64::from_polar(1.0, theta);
        let phi1 = (e - 1.0) / (i * theta);
        let phi2 = e / (i * theta) + (e - 1.0) / (theta * theta);
        (phi1, phi2)
    };
    (phi1 - phi2, phi2)
}
