//! Excited-state dynamics under stationary (unheralded) illumination.
//!
//! The light is switched on at `t = 0`. To first order in the field the
//! excited-state block of the molecular density matrix is
//!
//! ```text
//! ρ_αβ(t) = μ_α μ_β e^{-iω_αβ t} ∫₀ᵗdτ₂ e^{-iω_β τ₂} ∫₀ᵗdτ₁ e^{iω_α τ₁} G(τ₂, τ₁)
//! ```
//!
//! with the CW correlation `G(t₂, t₁) = ∫dω e^{iω(t₂-t₁)} A(ω)² n̄(ω)`.
//! Swapping the order of integration leaves one frequency integral per time
//! point,
//!
//! ```text
//! ρ_αβ(t) = μ_α μ_β t² e^{-iω_αβ t/2} ∫dω A(ω)² n̄(ω) sinc(Δ_α t/2) sinc(Δ_β t/2)
//! ```
//!
//! where `Δ_γ = ω - ω_γg`. The integral is real, so every matrix is a phase
//! rotation of a real Gram matrix and stays Hermitian and positive
//! semidefinite under any positive-weight quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{angular, sinc, FrequencyGrid, TimeGrid};
use crate::pdc::{thermal_mean, PhotonSpectrum, ThermalParams};
use crate::trajectory::{DensityMatrix, DensityTrajectory, Normalization};

/// One excited state: transition energy above the ground state and its
/// (real) transition dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    /// ω_αg in cm⁻¹.
    pub transition_energy: f64,
    /// μ_αg, dimensionless.
    pub dipole: f64,
}

/// Ground state plus an ordered list of excited states.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularSystem {
    levels: Vec<Level>,
}

impl MolecularSystem {
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParams("molecule needs at least one excited level".into()));
        }
        for (i, l) in levels.iter().enumerate() {
            if !(l.transition_energy.is_finite() && l.transition_energy > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "level {i}: transition energy {} must be > 0",
                    l.transition_energy
                )));
            }
            if !l.dipole.is_finite() {
                return Err(Error::InvalidParams(format!("level {i}: dipole {} is not finite", l.dipole)));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn dipoles(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.dipole).collect()
    }

    /// ω_αβ = ω_αg - ω_βg in cm⁻¹.
    pub fn splitting(&self, alpha: usize, beta: usize) -> f64 {
        self.levels[alpha].transition_energy - self.levels[beta].transition_energy
    }
}

/// `G(t₂, t₁) = ∫dω e^{iω(t₂-t₁)} A(ω)² n̄(ω)` by trapezoid quadrature.
pub fn correlation_cw(t2: f64, t1: f64, spectrum: &PhotonSpectrum) -> Result<Complex64> {
    let weights = spectral_weights(spectrum)?;
    let tau = t2 - t1;
    let samples: Vec<Complex64> = spectrum
        .grid()
        .points()
        .into_iter()
        .zip(weights)
        .map(|(w, a2n)| Complex64::from_polar(a2n, angular(w) * tau))
        .collect();
    spectrum.grid().integrate(&samples)
}

/// `A(ω)² n̄(ω)` on the spectrum grid.
fn spectral_weights(spectrum: &PhotonSpectrum) -> Result<Vec<f64>> {
    if spectrum.grid().min() <= 0.0 {
        return Err(Error::InvalidGrid(format!(
            "correlation needs strictly positive frequencies, grid starts at {}",
            spectrum.grid().min()
        )));
    }
    let reference = spectrum.amplitude_reference();
    Ok(spectrum
        .grid()
        .points()
        .into_iter()
        .zip(spectrum.values())
        .map(|(w, n)| w / reference * n)
        .collect())
}

/// Density-matrix trajectory under a stationary photon spectrum, raw units.
pub fn evolve_unconditional(
    mol: &MolecularSystem,
    spectrum: &PhotonSpectrum,
    times: &TimeGrid,
) -> Result<DensityTrajectory> {
    if times.min() < 0.0 {
        return Err(Error::InvalidInput(format!(
            "light is switched on at t = 0; time grid starts at {}",
            times.min()
        )));
    }
    let grid = spectrum.grid();
    let quad: Vec<f64> = spectral_weights(spectrum)?
        .into_iter()
        .zip(grid.trapezoid_weights())
        .map(|(a2n, w)| a2n * w)
        .collect();
    let freqs = grid.points();
    let n = mol.dim();
    let detunings: Vec<Vec<f64>> = mol
        .levels()
        .iter()
        .map(|l| freqs.iter().map(|w| angular(w - l.transition_energy)).collect())
        .collect();
    let mu = mol.dipoles();

    let mut overlap = vec![0.0; n * n];
    let mut envelopes = vec![vec![0.0; freqs.len()]; n];
    let matrices = times
        .points()
        .into_iter()
        .map(|t| {
            for (env, det) in envelopes.iter_mut().zip(&detunings) {
                for (e, d) in env.iter_mut().zip(det) {
                    *e = sinc(0.5 * d * t);
                }
            }
            for a in 0..n {
                for b in a..n {
                    let s: f64 = quad
                        .iter()
                        .zip(&envelopes[a])
                        .zip(&envelopes[b])
                        .map(|((q, x), y)| q * x * y)
                        .sum();
                    overlap[a * n + b] = s;
                    overlap[b * n + a] = s;
                }
            }
            DensityMatrix::from_fn(n, n, |a, b| {
                let phase = -0.5 * angular(mol.splitting(a, b)) * t;
                Complex64::from_polar(mu[a] * mu[b] * t * t * overlap[a * n + b], phase)
            })
        })
        .collect();
    DensityTrajectory::new(*times, matrices, Normalization::Raw)
}

/// [`evolve_unconditional`] driven by black-body occupations.
pub fn evolve_under_blackbody(
    mol: &MolecularSystem,
    thermal: &ThermalParams,
    grid: &FrequencyGrid,
    times: &TimeGrid,
) -> Result<DensityTrajectory> {
    let spectrum = thermal_mean(grid, thermal)?;
    evolve_unconditional(mol, &spectrum, times)
}
