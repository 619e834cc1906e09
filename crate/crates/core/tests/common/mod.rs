//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use pseudosun::{correlation_cw, DensityMatrix, DensityTrajectory, MolecularSystem, PhotonSpectrum};

pub const C_CM_PER_FS: f64 = 2.997_924_58e-5;
pub const C2_CM_K: f64 = 1.438_776_9;

pub fn omega(wavenumber: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_CM_PER_FS * wavenumber
}

/// Mean signal photon number, written out directly.
pub fn pdc_mean(w: f64, pump: f64, center: f64, te: f64, gain: f64) -> f64 {
    let _ = pump;
    let x = std::f64::consts::PI * C_CM_PER_FS * (w - center) * te;
    let s = if x == 0.0 { 1.0 } else { x.sin() / x };
    (gain * s).sinh().powi(2)
}

pub fn planck_occupation(w: f64, temperature: f64) -> f64 {
    1.0 / ((C2_CM_K * w / temperature).exp() - 1.0)
}

/// `Σ_{n≤N} n (1-ζ) ζⁿ` term by term.
pub fn brute_force_mean(zeta: f64, n_max: usize) -> f64 {
    (0..=n_max).map(|n| n as f64 * (1.0 - zeta) * zeta.powi(n as i32)).sum()
}

/// Composite Simpson weights for `2m` intervals of width `h`.
fn simpson_weights(intervals: usize, h: f64) -> Vec<f64> {
    assert!(intervals.is_multiple_of(2));
    (0..=intervals)
        .map(|k| {
            let c = if k == 0 || k == intervals {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// `ρ_αβ(t) = μ_α μ_β e^{-iω_αβ t} ∫₀ᵗ∫₀ᵗ e^{-iω_β τ₂} e^{iω_α τ₁} G(τ₂, τ₁) dτ₁ dτ₂`
/// by a tensor Simpson rule with step ≤ `max_step`, `G` tabulated at every
/// lag multiple of the step.
pub fn double_time_density(
    mol: &MolecularSystem,
    spectrum: &PhotonSpectrum,
    t: f64,
    max_step: f64,
) -> DensityMatrix {
    let mut intervals = (t / max_step).ceil() as usize;
    intervals += intervals % 2;
    let h = t / intervals as f64;
    let w = simpson_weights(intervals, h);
    let lags: Vec<Complex64> =
        (0..=2 * intervals).map(|k| correlation_cw((k as f64 - intervals as f64) * h, 0.0, spectrum).unwrap()).collect();
    let n = mol.dim();
    let levels = mol.levels();
    let tau: Vec<f64> = (0..=intervals).map(|k| k as f64 * h).collect();
    // inner[α][j] = Σ_k w_k e^{iω_α τ_k} G(τ_j - τ_k)
    let inner: Vec<Vec<Complex64>> = levels
        .iter()
        .map(|l| {
            let ph: Vec<Complex64> =
                tau.iter().zip(&w).map(|(s, wk)| Complex64::from_polar(*wk, omega(l.transition_energy) * s)).collect();
            (0..=intervals)
                .map(|j| (0..=intervals).map(|k| ph[k] * lags[j + intervals - k]).sum())
                .collect()
        })
        .collect();
    DensityMatrix::from_fn(n, n, |a, b| {
        let (la, lb) = (levels[a], levels[b]);
        let outer: Complex64 = (0..=intervals)
            .map(|j| Complex64::from_polar(w[j], -omega(lb.transition_energy) * tau[j]) * inner[a][j])
            .sum();
        let wab = omega(la.transition_energy - lb.transition_energy);
        la.dipole * lb.dipole * Complex64::from_polar(1.0, -wab * t) * outer
    })
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

/// Linearly interpolated zero crossings of `y(x)`.
pub fn zero_crossings(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..x.len() {
        let (a, b) = (y[k - 1], y[k]);
        if a == 0.0 && k > 1 {
            continue;
        }
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            out.push(x[k - 1] + (x[k] - x[k - 1]) * a / (a - b));
        }
    }
    out
}

/// Violations of the structural invariants every trajectory must satisfy.
pub fn invariant_violations(name: &str, traj: &DensityTrajectory, pure: bool) -> Vec<String> {
    let mut v = Vec::new();
    let herm = traj.max_hermiticity_error();
    if !(herm <= 1e-12) {
        v.push(format!("{name}: hermiticity error {herm:e}"));
    }
    let eig = traj.min_relative_eigenvalue();
    if !(eig >= -1e-10) {
        v.push(format!("{name}: relative eigenvalue {eig:e}"));
    }
    if pure {
        let rank = traj.max_rank_one_defect();
        if !(rank < 1e-10) {
            v.push(format!("{name}: rank-one defect {rank:e}"));
        }
    }
    v
}
