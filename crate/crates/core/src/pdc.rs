//! Photon statistics of CW-pumped parametric down-conversion.
//!
//! For a continuous-wave pump each signal mode ω is paired with the idler
//! mode `ω_p - ω` in a two-mode squeezed vacuum of strength
//! `r(ω) = B·sinc[(ω - ω̄_s)T_e/2]`. Tracing out the idler leaves every signal
//! mode in a geometric (thermal-like) photon-number state with
//! `ζ(ω) = tanh² r(ω)`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::{
    sinc, FrequencyGrid, SECOND_RADIATION_CONSTANT, SPEED_OF_LIGHT_CM_PER_FS,
};

/// Source parameters fully determining the squeeze profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcParams {
    /// Pump wavenumber ω_p (cm⁻¹).
    pub pump_freq: f64,
    /// Signal center ω̄_s (cm⁻¹); the idler center is `ω_p - ω̄_s`.
    pub signal_center: f64,
    /// Entanglement time T_e (fs).
    pub entanglement_time: f64,
    /// Dimensionless gain B.
    pub gain: f64,
}

impl PdcParams {
    pub fn new(pump_freq: f64, signal_center: f64, entanglement_time: f64, gain: f64) -> Result<Self> {
        let p = Self { pump_freq, signal_center, entanglement_time, gain };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.pump_freq, self.signal_center, self.entanglement_time, self.gain]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams(format!("non-finite PDC parameters {self:?}")));
        }
        if self.pump_freq <= 0.0 {
            return Err(Error::InvalidParams(format!("pump_freq {} must be > 0", self.pump_freq)));
        }
        if !(self.signal_center > 0.0 && self.signal_center < self.pump_freq) {
            return Err(Error::InvalidParams(format!(
                "signal_center {} must lie in (0, pump_freq = {})",
                self.signal_center, self.pump_freq
            )));
        }
        if self.entanglement_time <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "entanglement_time {} must be > 0",
                self.entanglement_time
            )));
        }
        if !(self.gain > 0.0 && self.gain < FRAC_PI_2) {
            return Err(Error::InvalidParams(format!("gain {} must lie in (0, π/2)", self.gain)));
        }
        Ok(())
    }

    /// Idler center `ω_p - ω̄_s`.
    pub fn idler_center(&self) -> f64 {
        self.pump_freq - self.signal_center
    }

    /// Width of one sinc lobe of `r(ω)` in cm⁻¹, i.e. the distance between zeros.
    pub fn lobe_width(&self) -> f64 {
        1.0 / (SPEED_OF_LIGHT_CM_PER_FS * self.entanglement_time)
    }

    /// The sinc argument `(ω - ω̄_s)T_e/2` in radians.
    pub fn phase_mismatch(&self, omega: f64) -> f64 {
        std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_FS * (omega - self.signal_center) * self.entanglement_time
    }
}

/// Crystal length and group velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalParams {
    /// Crystal length L (mm).
    pub length: f64,
    /// Group velocities of pump, signal and idler (mm/fs).
    pub group_velocity_pump: f64,
    pub group_velocity_signal: f64,
    pub group_velocity_idler: f64,
}

/// Transit-time mismatches of a crystal, all in fs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementTimes {
    pub signal: f64,
    pub idler: f64,
    pub entanglement: f64,
}

/// Black-body reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    /// Temperature (K).
    pub temperature: f64,
}

impl ThermalParams {
    pub const SOLAR_TEMPERATURE: f64 = 5777.0;

    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidParams(format!("temperature {temperature} must be > 0")));
        }
        Ok(Self { temperature })
    }
}

impl Default for ThermalParams {
    fn default() -> Self {
        Self { temperature: Self::SOLAR_TEMPERATURE }
    }
}

/// Mean photon number per mode sampled on a frequency grid.
///
/// `amplitude_reference` is the wavenumber at which the field amplitude
/// `A(ω) = √(ω/ω_ref)` equals one when the spectrum drives molecular dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonSpectrum {
    grid: FrequencyGrid,
    values: Vec<f64>,
    amplitude_reference: f64,
}

impl PhotonSpectrum {
    pub fn new(grid: FrequencyGrid, values: Vec<f64>, amplitude_reference: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} spectrum values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("spectrum value {bad} is not finite and ≥ 0")));
        }
        if !(amplitude_reference.is_finite() && amplitude_reference > 0.0) {
            return Err(Error::InvalidInput(format!(
                "amplitude reference {amplitude_reference} must be > 0"
            )));
        }
        Ok(Self { grid, values, amplitude_reference })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn amplitude_reference(&self) -> f64 {
        self.amplitude_reference
    }

    /// Same occupations with a different `A(ω)` reference point.
    pub fn with_amplitude_reference(mut self, reference: f64) -> Result<Self> {
        if !(reference.is_finite() && reference > 0.0) {
            return Err(Error::InvalidInput(format!("amplitude reference {reference} must be > 0")));
        }
        self.amplitude_reference = reference;
        Ok(self)
    }
}

/// `r(ω) = B·sinc[(ω - ω̄_s)T_e/2]`.
pub fn squeeze_profile(omega: f64, p: &PdcParams) -> f64 {
    p.gain * sinc(p.phase_mismatch(omega))
}

/// `T_σ = L/v_p - L/v_σ` for signal and idler, and `T_e = |T_s - T_i|`.
pub fn entanglement_time_from_crystal(c: &CrystalParams) -> Result<EntanglementTimes> {
    let v = [c.group_velocity_pump, c.group_velocity_signal, c.group_velocity_idler];
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidParams(format!("group velocities {v:?} must be > 0")));
    }
    if !(c.length.is_finite() && c.length > 0.0) {
        return Err(Error::InvalidParams(format!("crystal length {} must be > 0", c.length)));
    }
    let signal = c.length / c.group_velocity_pump - c.length / c.group_velocity_signal;
    let idler = c.length / c.group_velocity_pump - c.length / c.group_velocity_idler;
    Ok(EntanglementTimes { signal, idler, entanglement: (signal - idler).abs() })
}

/// `ζ(ω) = tanh² r(ω)`.
pub fn squeeze_fraction(omega: f64, p: &PdcParams) -> f64 {
    let t = squeeze_profile(omega, p).tanh();
    t * t
}

/// Geometric photon-number law `P(n) = (1 - ζ)ζⁿ` for `n = 0..=n_max`.
///
/// The mass beyond `n_max` is `ζ^(n_max+1)`.
pub fn photon_number_pmf(omega: f64, p: &PdcParams, n_max: usize) -> Vec<f64> {
    geometric_pmf(squeeze_fraction(omega, p), n_max)
}

pub(crate) fn geometric_pmf(zeta: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut pn = 1.0 - zeta;
    for _ in 0..=n_max {
        out.push(pn);
        pn *= zeta;
    }
    out
}

/// `n̄(ω) = sinh² r(ω)` on every grid point.
pub fn mean_photon_number(grid: &FrequencyGrid, p: &PdcParams) -> Result<PhotonSpectrum> {
    p.validate()?;
    let values = grid
        .points()
        .into_iter()
        .map(|w| {
            let s = squeeze_profile(w, p).sinh();
            s * s
        })
        .collect();
    PhotonSpectrum::new(*grid, values, p.signal_center)
}

/// Bose–Einstein occupation `1/(exp(c₂ν̃/T) - 1)` on every grid point.
///
/// The resulting spectrum uses the grid midpoint as its `A(ω)` reference.
pub fn thermal_mean(grid: &FrequencyGrid, t: &ThermalParams) -> Result<PhotonSpectrum> {
    ThermalParams::new(t.temperature)?;
    if grid.min() <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "thermal occupation diverges at wavenumber {} ≤ 0",
            grid.min()
        )));
    }
    let values = grid
        .points()
        .into_iter()
        .map(|w| thermal_occupation(w, t.temperature))
        .collect();
    PhotonSpectrum::new(*grid, values, 0.5 * (grid.min() + grid.max()))
}

#[inline]
pub(crate) fn thermal_occupation(wavenumber: f64, temperature: f64) -> f64 {
    1.0 / (SECOND_RADIATION_CONSTANT * wavenumber / temperature).exp_m1()
}

/// `A(ω) = √(ω/ω_ref)`, the vacuum field amplitude normalized to one at `ω_ref`.
pub fn vacuum_amplitude(omega: f64, reference: f64) -> Result<f64> {
    if omega < 0.0 || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("field amplitude undefined at wavenumber {omega}")));
    }
    if !(reference > 0.0) {
        return Err(Error::InvalidInput(format!("amplitude reference {reference} must be > 0")));
    }
    Ok((omega / reference).sqrt())
}
