//! Dynamics conditioned on detecting the idler photon at a known time.
//!
//! Detecting the idler at `tᵢ` leaves the signal in a pure single-photon
//! wavepacket, so the first-order correlation factorizes as
//! `G(t₂, t₁; tᵢ) = E*(t₂)E(t₁)` with the effective field
//!
//! ```text
//! E(t) = ∫₀^∞ dω e^{-iω(t - tᵢ)} A(ω) tanh r(ω)
//! ```
//!
//! and every conditional density matrix is the projector `φφ†` onto the
//! first-order amplitudes `φ_α(t) = μ_α ∫ e^{-iω_α(t-τ)} E(τ) dτ`. For weak
//! gain with `A(ω) ≈ A(ω̄_s)` the field is a box of width `T_e` centred on
//! `tᵢ`, which gives the closed forms implemented here.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::MolecularSystem;
use crate::error::{Error, Result};
use crate::numerics::{
    angular, cumulative_oscillatory_integral, sinc, FrequencyGrid, TimeGrid, SPEED_OF_LIGHT_CM_PER_FS,
};
use crate::pdc::{squeeze_profile, vacuum_amplitude, PdcParams};
use crate::trajectory::{normalize_trajectory, DensityMatrix, DensityTrajectory, Normalization};

/// Sinc lobes kept on each side of ω̄_s by [`herald_frequency_grid`].
pub const HERALD_GRID_LOBES: f64 = 50.0;
/// Minimum quadrature points per sinc lobe in [`herald_frequency_grid`].
pub const HERALD_GRID_POINTS_PER_LOBE: f64 = 32.0;

/// How the effective field is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldMethod {
    /// Frequency quadrature of `A(ω) tanh r(ω)`.
    ExactQuadrature,
    /// Box of width `T_e` with carrier ω̄_s (`tanh r ≈ r`, `A(ω) ≈ A(ω̄_s)`).
    RectApprox,
}

impl FieldMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldMethod::ExactQuadrature => "exact_quadrature",
            FieldMethod::RectApprox => "rect_approx",
        }
    }
}

impl std::str::FromStr for FieldMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_quadrature" => Ok(FieldMethod::ExactQuadrature),
            "rect_approx" => Ok(FieldMethod::RectApprox),
            other => Err(Error::InvalidInput(format!("unknown field method `{other}`"))),
        }
    }
}

/// Effective field of the heralded signal photon sampled on a time grid.
///
/// Amplitudes share the units of the frequency integral (cm⁻¹); the
/// `1/√(P_i Z)` prefactor is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedField {
    times: TimeGrid,
    herald_time: f64,
    amplitudes: Vec<Complex64>,
    method: FieldMethod,
    carrier: f64,
}

impl HeraldedField {
    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn herald_time(&self) -> f64 {
        self.herald_time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn method(&self) -> FieldMethod {
        self.method
    }

    /// Carrier wavenumber ω̄_s (cm⁻¹).
    pub fn carrier(&self) -> f64 {
        self.carrier
    }
}

/// Conditional trajectory for one herald time.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedTrajectory {
    trajectory: DensityTrajectory,
    herald_time: f64,
}

impl HeraldedTrajectory {
    pub fn trajectory(&self) -> &DensityTrajectory {
        &self.trajectory
    }

    pub fn herald_time(&self) -> f64 {
        self.herald_time
    }

    pub fn normalized(&self, mode: Normalization) -> Result<Self> {
        Ok(Self { trajectory: normalize_trajectory(&self.trajectory, mode)?, herald_time: self.herald_time })
    }
}

/// Frequency grid for the exact field: ω̄_s ± 50 sinc lobes clipped at zero,
/// at least 32 points per lobe, and fine enough that the discrete spectrum
/// does not alias the field within `max_lag` fs of the herald.
pub fn herald_frequency_grid(p: &PdcParams, max_lag: f64) -> Result<FrequencyGrid> {
    p.validate()?;
    if !(max_lag.is_finite() && max_lag >= 0.0) {
        return Err(Error::InvalidInput(format!("max_lag {max_lag} must be ≥ 0")));
    }
    let lobe = p.lobe_width();
    let lo = (p.signal_center - HERALD_GRID_LOBES * lobe).max(0.0);
    let hi = p.signal_center + HERALD_GRID_LOBES * lobe;
    // The quadrature repeats the field with period 1/(c·h).
    let period = 4.0 * (max_lag + p.entanglement_time);
    let h = (lobe / HERALD_GRID_POINTS_PER_LOBE).min(1.0 / (SPEED_OF_LIGHT_CM_PER_FS * period));
    let count = ((hi - lo) / h).ceil() as usize + 1;
    FrequencyGrid::new(lo, hi, count)
}

/// Largest time step that resolves every frequency of `grid`.
pub fn max_time_step(grid: &FrequencyGrid) -> f64 {
    1.0 / (2.0 * SPEED_OF_LIGHT_CM_PER_FS * grid.max())
}

/// `w_k A(ω_k) tanh r(ω_k)` and the angular frequency of each node.
fn field_spectrum(p: &PdcParams, grid: &FrequencyGrid) -> Result<Vec<(f64, f64)>> {
    grid.points()
        .into_iter()
        .zip(grid.trapezoid_weights())
        .map(|(w, q)| {
            let a = vacuum_amplitude(w, p.signal_center)?;
            Ok((angular(w), q * a * squeeze_profile(w, p).tanh()))
        })
        .collect()
}

/// `Σ_k c_k e^{-iω_k s}` for a uniform node set. Phases are advanced by
/// recurrence inside blocks of 64 nodes and recomputed at each block start.
fn synthesize(spectrum: &[(f64, f64)], s: f64) -> Complex64 {
    const BLOCK: usize = 64;
    let mut total = Complex64::new(0.0, 0.0);
    for block in spectrum.chunks(BLOCK) {
        let mut z = Complex64::from_polar(1.0, -block[0].0 * s);
        let step = if block.len() > 1 {
            Complex64::from_polar(1.0, -(block[1].0 - block[0].0) * s)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for &(_, c) in block {
            acc += c * z;
            z *= step;
        }
        total += acc;
    }
    total
}

/// Box amplitude `B/(c T_e)`: the Fourier pair of `B·sinc` in these units.
fn rect_height(p: &PdcParams) -> f64 {
    p.gain / (SPEED_OF_LIGHT_CM_PER_FS * p.entanglement_time)
}

/// `rect(x)` with the edge value 1/2.
fn rect(x: f64) -> f64 {
    let a = x.abs();
    if a < 0.5 {
        1.0
    } else if a == 0.5 {
        0.5
    } else {
        0.0
    }
}

fn rect_field_at(p: &PdcParams, herald_time: f64, t: f64) -> Complex64 {
    let lag = t - herald_time;
    let box_ = rect(lag / p.entanglement_time);
    if box_ == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(rect_height(p) * box_, -angular(p.signal_center) * lag)
}

/// Sample the effective field for an idler detected at `herald_time`.
///
/// `grid` is the frequency quadrature for [`FieldMethod::ExactQuadrature`]
/// (see [`herald_frequency_grid`]) and is ignored by the box approximation.
pub fn heralded_field(
    times: &TimeGrid,
    herald_time: f64,
    p: &PdcParams,
    grid: &FrequencyGrid,
    method: FieldMethod,
) -> Result<HeraldedField> {
    p.validate()?;
    if !herald_time.is_finite() {
        return Err(Error::InvalidInput(format!("herald time {herald_time} is not finite")));
    }
    let amplitudes = match method {
        FieldMethod::RectApprox => times.points().into_iter().map(|t| rect_field_at(p, herald_time, t)).collect(),
        FieldMethod::ExactQuadrature => {
            check_time_resolution(times, grid)?;
            let spectrum = field_spectrum(p, grid)?;
            times.points().into_iter().map(|t| synthesize(&spectrum, t - herald_time)).collect()
        }
    };
    Ok(HeraldedField { times: *times, herald_time, amplitudes, method, carrier: p.signal_center })
}

fn check_time_resolution(times: &TimeGrid, grid: &FrequencyGrid) -> Result<()> {
    let limit = max_time_step(grid);
    if times.step() > limit {
        return Err(Error::InvalidInput(format!(
            "time step {} fs aliases frequencies up to {} cm⁻¹; use a step ≤ {limit} fs",
            times.step(),
            grid.max()
        )));
    }
    Ok(())
}

/// First-order amplitudes `φ_α(t)`, one time series per level.
fn amplitudes(mol: &MolecularSystem, field: &HeraldedField) -> Result<Vec<Vec<Complex64>>> {
    let times = field.times();
    if times.min() < 0.0 {
        return Err(Error::InvalidInput(format!(
            "light is switched on at t = 0; time grid starts at {}",
            times.min()
        )));
    }
    let carrier = angular(field.carrier);
    let ti = field.herald_time;
    let points = times.points();
    // Demodulated envelope u(τ) = E(τ) e^{iω̄(τ - tᵢ)}.
    let envelope: Vec<Complex64> = field
        .amplitudes
        .iter()
        .zip(&points)
        .map(|(e, t)| e * Complex64::from_polar(1.0, carrier * (t - ti)))
        .collect();
    mol.levels()
        .iter()
        .map(|level| {
            let w = angular(level.transition_energy);
            let running = cumulative_oscillatory_integral(times, &envelope, w - carrier)?;
            Ok(running
                .into_iter()
                .zip(&points)
                .map(|(acc, t)| level.dipole * Complex64::from_polar(1.0, carrier * ti - w * t) * acc)
                .collect())
        })
        .collect()
}

fn outer(phi: &[Vec<Complex64>], k: usize) -> DensityMatrix {
    let n = phi.len();
    DensityMatrix::from_fn(n, n, |a, b| phi[a][k] * phi[b][k].conj())
}

/// Conditional trajectory `ρ(t; tᵢ) = φ(t)φ(t)†`, raw units.
pub fn evolve_heralded(mol: &MolecularSystem, field: &HeraldedField) -> Result<HeraldedTrajectory> {
    let phi = amplitudes(mol, field)?;
    let matrices = (0..field.times.len()).map(|k| outer(&phi, k)).collect();
    Ok(HeraldedTrajectory {
        trajectory: DensityTrajectory::new(field.times, matrices, Normalization::Raw)?,
        herald_time: field.herald_time,
    })
}

fn max_diag_normalized(mut m: DensityMatrix) -> Result<DensityMatrix> {
    let peak = (0..m.nrows()).map(|i| m[(i, i)].re).fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::CannotNormalize("all populations vanish".into()));
    }
    m /= Complex64::new(peak, 0.0);
    Ok(m)
}

/// Post-pulse density matrix from the box field, max-diagonal normalized:
/// `ρ_αβ ∝ μ_α μ_β sinc_α sinc_β e^{-iω_αβ(t-tᵢ)}` with
/// `sinc_γ = sinc[(ω_γg - ω̄_s)T_e/2]`.
pub fn long_time_closed_form(mol: &MolecularSystem, p: &PdcParams, t: f64, herald_time: f64) -> Result<DensityMatrix> {
    p.validate()?;
    if !(t > herald_time + 0.5 * p.entanglement_time) {
        return Err(Error::Precondition(format!(
            "t = {t} fs lies inside the field support ending at {} fs",
            herald_time + 0.5 * p.entanglement_time
        )));
    }
    let lag = t - herald_time;
    let phi: Vec<Complex64> = mol
        .levels()
        .iter()
        .map(|l| {
            let amp = l.dipole * sinc(p.phase_mismatch(l.transition_energy));
            Complex64::from_polar(amp, -angular(l.transition_energy) * lag)
        })
        .collect();
    max_diag_normalized(outer_vec(&phi))
}

/// Delta-function excitation at `tᵢ`: `ρ_αβ ∝ μ_α μ_β e^{-iω_αβ(t-tᵢ)}`,
/// max-diagonal normalized.
pub fn impulsive_limit(mol: &MolecularSystem, t: f64, herald_time: f64) -> Result<DensityMatrix> {
    if t < herald_time {
        return Err(Error::Precondition(format!("t = {t} fs precedes the herald at {herald_time} fs")));
    }
    let lag = t - herald_time;
    let phi: Vec<Complex64> = mol
        .levels()
        .iter()
        .map(|l| Complex64::from_polar(l.dipole, -angular(l.transition_energy) * lag))
        .collect();
    max_diag_normalized(outer_vec(&phi))
}

fn outer_vec(phi: &[Complex64]) -> DensityMatrix {
    let v = DVector::from_column_slice(phi);
    &v * v.adjoint()
}

/// How herald times are drawn for [`average_over_heralds_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeraldSampling {
    /// Evenly spaced herald times on a lattice commensurate with the time grid.
    Uniform,
    /// Independent uniform draws from a seeded generator.
    Random { seed: u64 },
}

/// Options for herald-time averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingOptions {
    pub samples: usize,
    pub method: FieldMethod,
    pub sampling: HeraldSampling,
    /// Padding (fs) of the herald window beyond each end of the time grid;
    /// raised to `T_e` when smaller.
    pub padding: f64,
}

impl AveragingOptions {
    pub fn new(samples: usize) -> Self {
        Self { samples, method: FieldMethod::ExactQuadrature, sampling: HeraldSampling::Uniform, padding: 0.0 }
    }
}

/// Herald times used by an averaging run.
pub fn herald_times(p: &PdcParams, times: &TimeGrid, options: &AveragingOptions) -> Result<Vec<f64>> {
    if options.samples == 0 {
        return Err(Error::InvalidInput("herald_samples must be ≥ 1".into()));
    }
    let pad = options.padding.max(p.entanglement_time);
    let lo = times.min() - pad;
    let hi = times.max() + pad;
    match options.sampling {
        HeraldSampling::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..options.samples).map(|_| rng.gen_range(lo..=hi)).collect())
        }
        HeraldSampling::Uniform if options.samples == 1 => Ok(vec![0.5 * (times.min() + times.max())]),
        HeraldSampling::Uniform => {
            let (start, stride) = uniform_lattice(times, pad, options.samples);
            let dt = times.step();
            Ok((0..options.samples).map(|j| times.min() + (start + (j * stride) as i64) as f64 * dt).collect())
        }
    }
}

/// Lattice of herald times in units of the time step: offset of the first
/// herald from `times.min()` and the stride between heralds. The window
/// covers the time grid padded by at least `pad` on both sides.
fn uniform_lattice(times: &TimeGrid, pad: f64, samples: usize) -> (i64, usize) {
    let dt = times.step();
    let span_steps = (times.len() - 1) as i64;
    let pad_steps = (pad / dt).ceil() as i64;
    let needed = span_steps + 2 * pad_steps;
    let stride = ((needed as f64) / (samples - 1) as f64).ceil().max(1.0) as usize;
    let width = (stride * (samples - 1)) as i64;
    // Centre the window, rounding the extra half step toward earlier heralds.
    let start = -((width - span_steps + 1) / 2);
    (start, stride)
}

/// Equal-weight average of heralded trajectories over uniformly spaced herald
/// times, exact-quadrature field, raw units.
pub fn average_over_heralds(
    mol: &MolecularSystem,
    p: &PdcParams,
    grid: &FrequencyGrid,
    times: &TimeGrid,
    herald_samples: usize,
) -> Result<DensityTrajectory> {
    average_over_heralds_with(mol, p, grid, times, &AveragingOptions::new(herald_samples))
}

/// Herald-time average with explicit sampling and field options.
///
/// Contributions are accumulated in herald order, so the result does not
/// depend on how the fields were computed.
pub fn average_over_heralds_with(
    mol: &MolecularSystem,
    p: &PdcParams,
    grid: &FrequencyGrid,
    times: &TimeGrid,
    options: &AveragingOptions,
) -> Result<DensityTrajectory> {
    let heralds = herald_times(p, times, options)?;
    let n = mol.dim();
    let mut sum = vec![DensityMatrix::zeros(n, n); times.len()];

    let lattice_fields = options.method == FieldMethod::ExactQuadrature
        && options.sampling == HeraldSampling::Uniform
        && heralds.len() > 1;
    if lattice_fields {
        // Heralds sit on the time lattice, so each field is a slice of one
        // profile sampled at integer multiples of the time step.
        check_time_resolution(times, grid)?;
        let pad = options.padding.max(p.entanglement_time);
        let (start, stride) = uniform_lattice(times, pad, options.samples);
        let dt = times.step();
        let nt = times.len() as i64;
        let last = start + (stride * (heralds.len() - 1)) as i64;
        let min_lag = -last;
        let max_lag = nt - 1 - start;
        let spectrum = field_spectrum(p, grid)?;
        let profile: Vec<Complex64> = (min_lag..=max_lag).map(|l| synthesize(&spectrum, l as f64 * dt)).collect();
        for (j, &ti) in heralds.iter().enumerate() {
            let offset = start + (j * stride) as i64;
            let field = HeraldedField {
                times: *times,
                herald_time: ti,
                amplitudes: (0..nt).map(|k| profile[(k - offset - min_lag) as usize]).collect(),
                method: options.method,
                carrier: p.signal_center,
            };
            accumulate(&mut sum, &amplitudes(mol, &field)?);
        }
    } else {
        for &ti in &heralds {
            let field = heralded_field(times, ti, p, grid, options.method)?;
            accumulate(&mut sum, &amplitudes(mol, &field)?);
        }
    }

    let scale = Complex64::new(1.0 / heralds.len() as f64, 0.0);
    let matrices = sum.into_iter().map(|m| m * scale).collect();
    DensityTrajectory::new(*times, matrices, Normalization::Raw)
}

fn accumulate(sum: &mut [DensityMatrix], phi: &[Vec<Complex64>]) {
    let n = phi.len();
    for (k, m) in sum.iter_mut().enumerate() {
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] += phi[a][k] * phi[b][k].conj();
            }
        }
    }
}

/// Two-photon coincidence signal `S(t, tᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceSignal {
    pub times: TimeGrid,
    pub herald_time: f64,
    pub values: Vec<f64>,
    /// Largest `|Im S| / max|Re S|` of the quadratic form before discarding
    /// the imaginary part.
    pub imaginary_residual: f64,
}

/// `S(t, tᵢ) = 2π A(ω̄_s)² Σ_αβ μ_α μ_β ρ_αβ(t; tᵢ)` in the trajectory's units.
pub fn coincidence_signal(
    mol: &MolecularSystem,
    heralded: &HeraldedTrajectory,
    p: &PdcParams,
) -> Result<CoincidenceSignal> {
    let traj = heralded.trajectory();
    if traj.dim() != mol.dim() {
        return Err(Error::InvalidInput(format!(
            "trajectory has {} levels, molecule has {}",
            traj.dim(),
            mol.dim()
        )));
    }
    let a = vacuum_amplitude(p.signal_center, p.signal_center)?;
    let prefactor = 2.0 * std::f64::consts::PI * a * a;
    let mu = DVector::from_iterator(mol.dim(), mol.dipoles().into_iter().map(|m| Complex64::new(m, 0.0)));
    let raw: Vec<Complex64> = traj
        .matrices()
        .iter()
        .map(|rho| prefactor * (mu.transpose() * rho * &mu)[(0, 0)])
        .collect();
    let scale = raw.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let worst_imag = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let imaginary_residual = if scale > 0.0 { worst_imag / scale } else { worst_imag };
    if imaginary_residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "coincidence quadratic form has imaginary residual {imaginary_residual:e}"
        )));
    }
    Ok(CoincidenceSignal {
        times: *traj.times(),
        herald_time: heralded.herald_time(),
        values: raw.into_iter().map(|z| z.re).collect(),
        imaginary_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Level;

    fn short_source() -> PdcParams {
        PdcParams::new(25000.0, 12000.0, 2.5, 0.15).unwrap()
    }

    fn long_source() -> PdcParams {
        PdcParams::new(25000.0, 18001.0, 50.0, 0.11).unwrap()
    }

    fn two_level() -> MolecularSystem {
        MolecularSystem::new(vec![
            Level { transition_energy: 18000.0, dipole: 1.0 },
            Level { transition_energy: 18500.0, dipole: 1.0 },
        ])
        .unwrap()
    }

    fn dummy_grid() -> FrequencyGrid {
        FrequencyGrid::new(1.0, 2.0, 2).unwrap()
    }

    #[test]
    fn rect_field_shape() {
        let p = short_source();
        let times = TimeGrid::new(0.0, 100.0, 4001).unwrap();
        let f = heralded_field(&times, 50.0, &p, &dummy_grid(), FieldMethod::RectApprox).unwrap();
        let at = |t: f64| f.amplitudes()[(t / times.step()).round() as usize];
        assert!((at(50.0).norm() - rect_height(&p)).abs() < 1e-12);
        assert_eq!(at(52.5).norm(), 0.0);
        assert!((at(51.25).norm() - 0.5 * rect_height(&p)).abs() < 1e-12);
        let delta = 0.675;
        let phase = at(50.0 + delta).arg();
        let expected = -angular(12000.0) * delta;
        let wrapped = (phase - expected).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(wrapped.min(2.0 * std::f64::consts::PI - wrapped) < 1e-9);
        // constant modulus inside, zero outside
        for (t, a) in times.points().iter().zip(f.amplitudes()) {
            let x = (t - 50.0) / 2.5;
            if x.abs() < 0.5 {
                assert!((a.norm() - rect_height(&p)).abs() < 1e-12);
            } else if x.abs() > 0.5 {
                assert_eq!(a.norm(), 0.0);
            }
        }
    }

    #[test]
    fn exact_field_rejects_undersampled_times() {
        let p = short_source();
        let grid = herald_frequency_grid(&p, 60.0).unwrap();
        let coarse = TimeGrid::new(0.0, 100.0, 101).unwrap();
        assert!(matches!(
            heralded_field(&coarse, 50.0, &p, &grid, FieldMethod::ExactQuadrature),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn herald_grid_covers_fifty_lobes() {
        let p = PdcParams { entanglement_time: 500.0, ..long_source() };
        let g = herald_frequency_grid(&p, 100.0).unwrap();
        assert_eq!(g.min(), 18001.0 - 50.0 * p.lobe_width());
        assert!((g.max() - (18001.0 + 50.0 * p.lobe_width())).abs() < 1e-9);
        assert!(g.step() <= p.lobe_width() / 32.0);
        assert_eq!(herald_frequency_grid(&long_source(), 100.0).unwrap().min(), 0.0);
        let clipped = herald_frequency_grid(&short_source(), 10.0).unwrap();
        assert_eq!(clipped.min(), 0.0);
    }

    #[test]
    fn heralded_trajectory_is_pure() {
        let p = long_source();
        let times = TimeGrid::new(0.0, 200.0, 2001).unwrap();
        let f = heralded_field(&times, 100.0, &p, &dummy_grid(), FieldMethod::RectApprox).unwrap();
        let traj = evolve_heralded(&two_level(), &f).unwrap();
        let tr = traj.trajectory();
        assert!(tr.max_hermiticity_error() < 1e-12);
        assert!(tr.max_rank_one_defect() < 1e-10);
        assert!(tr.min_relative_eigenvalue() > -1e-10);
    }

    #[test]
    fn populations_freeze_after_the_pulse() {
        let p = long_source();
        let times = TimeGrid::new(0.0, 250.0, 2501).unwrap();
        let f = heralded_field(&times, 100.0, &p, &dummy_grid(), FieldMethod::RectApprox).unwrap();
        let traj = evolve_heralded(&two_level(), &f).unwrap();
        let rho11 = traj.trajectory().element(0, 0);
        let after: Vec<f64> = rho11[1300..].iter().map(|z| z.re).collect();
        let spread = after.iter().fold(0.0f64, |a, b| a.max((b - after[0]).abs()));
        assert!(spread < 1e-10 * after[0]);
    }

    #[test]
    fn closed_form_edge_cases() {
        let degenerate = MolecularSystem::new(vec![
            Level { transition_energy: 18000.0, dipole: 1.0 },
            Level { transition_energy: 18000.0, dipole: 1.0 },
        ])
        .unwrap();
        let m = long_time_closed_form(&degenerate, &short_source(), 60.0, 50.0).unwrap();
        assert!(m.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));

        for te in [2.5, 50.0, 300.0] {
            let p = PdcParams::new(25000.0, 18000.0, te, 0.1).unwrap();
            let m = long_time_closed_form(&two_level(), &p, 400.0, 0.0).unwrap();
            assert!((m[(0, 0)].re - 1.0).abs() < 1e-15);
        }

        assert!(matches!(
            long_time_closed_form(&two_level(), &long_source(), 70.0, 50.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn impulsive_edge_cases() {
        let mol = MolecularSystem::new(vec![
            Level { transition_energy: 18000.0, dipole: 2.0 },
            Level { transition_energy: 18500.0, dipole: 1.0 },
        ])
        .unwrap();
        let m = impulsive_limit(&mol, 10.0, 10.0).unwrap();
        let expected = [[1.0, 0.5], [0.5, 0.25]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((m[(a, b)] - Complex64::new(expected[a][b], 0.0)).norm() < 1e-15);
            }
        }
        let single = MolecularSystem::new(vec![Level { transition_energy: 18000.0, dipole: 0.3 }]).unwrap();
        for t in [0.0, 3.3, 77.0] {
            assert!((impulsive_limit(&single, t, 0.0).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);
        }
        assert!(impulsive_limit(&mol, 1.0, 2.0).is_err());
    }

    #[test]
    fn single_sample_average_is_the_heralded_trajectory() {
        let p = long_source();
        let times = TimeGrid::new(0.0, 100.0, 501).unwrap();
        let mut opts = AveragingOptions::new(1);
        opts.method = FieldMethod::RectApprox;
        let avg = average_over_heralds_with(&two_level(), &p, &dummy_grid(), &times, &opts).unwrap();
        let f = heralded_field(&times, 50.0, &p, &dummy_grid(), FieldMethod::RectApprox).unwrap();
        let single = evolve_heralded(&two_level(), &f).unwrap();
        for (a, b) in avg.matrices().iter().zip(single.trajectory().matrices()) {
            assert!((a - b).norm() <= 1e-14 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn uniform_heralds_pad_the_time_window() {
        let p = short_source();
        let times = TimeGrid::new(0.0, 100.0, 1001).unwrap();
        let h = herald_times(&p, &times, &AveragingOptions::new(512)).unwrap();
        assert_eq!(h.len(), 512);
        assert!(h[0] <= -2.5 + 1e-12 && h[511] >= 102.5 - 1e-12);
        let dt = times.step();
        for w in h.windows(2) {
            let stride = (w[1] - w[0]) / dt;
            assert!((stride - stride.round()).abs() < 1e-6);
        }
        assert!(herald_times(&p, &times, &AveragingOptions::new(0)).is_err());
    }

    #[test]
    fn lattice_and_direct_fields_agree() {
        let p = PdcParams::new(25000.0, 18001.0, 20.0, 0.11).unwrap();
        let times = TimeGrid::new(0.0, 60.0, 601).unwrap();
        let grid = herald_frequency_grid(&p, 100.0).unwrap();
        let mol = two_level();
        let mut opts = AveragingOptions::new(7);
        let fast = average_over_heralds_with(&mol, &p, &grid, &times, &opts).unwrap();
        // Same heralds, each field synthesized directly.
        let mut slow = vec![DensityMatrix::zeros(2, 2); times.len()];
        for ti in herald_times(&p, &times, &opts).unwrap() {
            let f = heralded_field(&times, ti, &p, &grid, FieldMethod::ExactQuadrature).unwrap();
            accumulate(&mut slow, &amplitudes(&mol, &f).unwrap());
        }
        let scale = fast.matrices().iter().map(|m| m.norm()).fold(0.0, f64::max);
        for (a, b) in fast.matrices().iter().zip(&slow) {
            assert!((a - b / Complex64::new(7.0, 0.0)).norm() < 1e-9 * scale);
        }
        opts.sampling = HeraldSampling::Random { seed: 11 };
        let r1 = average_over_heralds_with(&mol, &p, &grid, &times, &opts).unwrap();
        let r2 = average_over_heralds_with(&mol, &p, &grid, &times, &opts).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn coincidence_of_degenerate_pair_is_four_times_single() {
        let p = long_source();
        let times = TimeGrid::new(0.0, 200.0, 801).unwrap();
        let f = heralded_field(&times, 100.0, &p, &dummy_grid(), FieldMethod::RectApprox).unwrap();
        let single = MolecularSystem::new(vec![Level { transition_energy: 18000.0, dipole: 1.0 }]).unwrap();
        let pair = MolecularSystem::new(vec![
            Level { transition_energy: 18000.0, dipole: 1.0 },
            Level { transition_energy: 18000.0, dipole: 1.0 },
        ])
        .unwrap();
        let s1 = coincidence_signal(&single, &evolve_heralded(&single, &f).unwrap(), &p).unwrap();
        let s2 = coincidence_signal(&pair, &evolve_heralded(&pair, &f).unwrap(), &p).unwrap();
        for (a, b) in s1.values.iter().zip(&s2.values) {
            assert!((b - 4.0 * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        assert!(s2.imaginary_residual < 1e-10);
        assert!(coincidence_signal(&single, &evolve_heralded(&pair, &f).unwrap(), &p).is_err());
    }
}
