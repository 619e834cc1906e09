//! Fit PDC source parameters so that `n̄(ω)` emulates a target spectrum over
//! a frequency window.
//!
//! The objective is the mean squared log-ratio of the two spectra, with a
//! `1e-12` floor inside the logarithms so isolated sinc zeros stay finite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::FrequencyGrid;
use crate::pdc::{mean_photon_number, thermal_occupation, PdcParams, ThermalParams};
use crate::simplex;

/// Floor added to both spectra before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-12;

/// Adjustable source parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FitParam {
    PumpFreq,
    SignalCenter,
    EntanglementTime,
    Gain,
}

impl FitParam {
    pub fn name(&self) -> &'static str {
        match self {
            FitParam::PumpFreq => "pump_freq",
            FitParam::SignalCenter => "signal_center",
            FitParam::EntanglementTime => "entanglement_time",
            FitParam::Gain => "gain",
        }
    }

    pub fn get(&self, p: &PdcParams) -> f64 {
        match self {
            FitParam::PumpFreq => p.pump_freq,
            FitParam::SignalCenter => p.signal_center,
            FitParam::EntanglementTime => p.entanglement_time,
            FitParam::Gain => p.gain,
        }
    }

    pub fn set(&self, p: &mut PdcParams, value: f64) {
        match self {
            FitParam::PumpFreq => p.pump_freq = value,
            FitParam::SignalCenter => p.signal_center = value,
            FitParam::EntanglementTime => p.entanglement_time = value,
            FitParam::Gain => p.gain = value,
        }
    }
}

impl std::str::FromStr for FitParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pump_freq" => Ok(FitParam::PumpFreq),
            "signal_center" => Ok(FitParam::SignalCenter),
            "entanglement_time" => Ok(FitParam::EntanglementTime),
            "gain" => Ok(FitParam::Gain),
            other => Err(Error::InvalidInput(format!("unknown fit parameter `{other}`"))),
        }
    }
}

/// Spectrum the PDC source should reproduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitTarget {
    /// Black-body occupation.
    Thermal(ThermalParams),
    /// Mean photon number of another PDC source (synthetic round trips).
    Pdc(PdcParams),
}

/// A free parameter and its search interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParam {
    pub param: FitParam,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    window: FrequencyGrid,
    target: FitTarget,
    free: Vec<FreeParam>,
    initial: PdcParams,
    target_values: Vec<f64>,
}

impl FitProblem {
    /// Validates that the window is strictly positive, the free set is
    /// non-empty and duplicate-free, the initial point is inside the bounds,
    /// and every point of the bounds box is a valid [`PdcParams`].
    pub fn new(window: FrequencyGrid, target: FitTarget, free: Vec<FreeParam>, initial: PdcParams) -> Result<Self> {
        if window.min() <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "fit window must be strictly positive, starts at {}",
                window.min()
            )));
        }
        if free.is_empty() {
            return Err(Error::InvalidInput("at least one free parameter is required".into()));
        }
        for (i, f) in free.iter().enumerate() {
            if free[..i].iter().any(|g| g.param == f.param) {
                return Err(Error::InvalidInput(format!("{} listed twice", f.param.name())));
            }
            if !(f.lo.is_finite() && f.hi.is_finite() && f.lo < f.hi) {
                return Err(Error::InvalidInput(format!(
                    "{} bounds [{}, {}] are not an interval",
                    f.param.name(),
                    f.lo,
                    f.hi
                )));
            }
            let v = f.param.get(&initial);
            if !(f.lo <= v && v <= f.hi) {
                return Err(Error::InvalidInput(format!(
                    "initial {} = {v} outside [{}, {}]",
                    f.param.name(),
                    f.lo,
                    f.hi
                )));
            }
        }
        initial.validate()?;
        // Each constraint on PdcParams is monotone in single coordinates, so
        // the box is valid iff its extreme corners are.
        let mut worst_low = initial;
        let mut worst_high = initial;
        for f in &free {
            f.param.set(&mut worst_low, f.lo);
            f.param.set(&mut worst_high, f.hi);
        }
        let mut corner_center_hi = worst_low;
        let mut corner_pump_lo = worst_high;
        for f in &free {
            match f.param {
                FitParam::SignalCenter => corner_center_hi.signal_center = f.hi,
                FitParam::PumpFreq => corner_pump_lo.pump_freq = f.lo,
                _ => {}
            }
        }
        for corner in [worst_low, worst_high, corner_center_hi, corner_pump_lo] {
            corner.validate().map_err(|e| Error::InvalidInput(format!("bounds admit invalid parameters: {e}")))?;
        }
        let target_values = match target {
            FitTarget::Thermal(t) => {
                ThermalParams::new(t.temperature)?;
                window.points().into_iter().map(|w| thermal_occupation(w, t.temperature)).collect()
            }
            FitTarget::Pdc(p) => mean_photon_number(&window, &p)?.values().to_vec(),
        };
        Ok(Self { window, target, free, initial, target_values })
    }

    pub fn window(&self) -> &FrequencyGrid {
        &self.window
    }

    pub fn target(&self) -> &FitTarget {
        &self.target
    }

    pub fn free(&self) -> &[FreeParam] {
        &self.free
    }

    pub fn initial(&self) -> &PdcParams {
        &self.initial
    }

    pub fn target_values(&self) -> &[f64] {
        &self.target_values
    }

    fn unit_coords(&self, p: &PdcParams) -> Vec<f64> {
        self.free.iter().map(|f| (f.param.get(p) - f.lo) / (f.hi - f.lo)).collect()
    }

    fn params_at(&self, x: &[f64]) -> PdcParams {
        let mut p = self.initial;
        for (f, u) in self.free.iter().zip(x) {
            f.param.set(&mut p, f.lo + u * (f.hi - f.lo));
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: PdcParams,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective after each simplex iteration.
    pub trace: Vec<f64>,
}

/// Mean over the window of `[ln(n̄ + ε) - ln(n̄_target + ε)]²`.
pub fn fit_objective(p: &PdcParams, problem: &FitProblem) -> Result<f64> {
    if problem.window.min() <= 0.0 {
        return Err(Error::InvalidInput("fit window contains non-positive wavenumbers".into()));
    }
    let model = mean_photon_number(&problem.window, p)?;
    Ok(log_residual(model.values(), &problem.target_values))
}

fn log_residual(model: &[f64], target: &[f64]) -> f64 {
    let sum: f64 = model
        .iter()
        .zip(target)
        .map(|(m, t)| {
            let d = (m + LOG_FLOOR).ln() - (t + LOG_FLOOR).ln();
            d * d
        })
        .sum();
    sum / model.len() as f64
}

/// Simplex search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iters: usize,
    /// Convergence threshold on the simplex diameter in unit-box coordinates.
    pub tol: f64,
    /// Edge length of the starting simplex in unit-box coordinates.
    pub initial_step: f64,
    /// Number of starts; starts after the first are drawn uniformly in the
    /// bounds from `seed`.
    pub starts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iters: 2000, tol: 1e-10, initial_step: 0.05, starts: 1, seed: 0 }
    }
}

/// Bounded simplex fit of the free parameters from `problem.initial`.
pub fn fit_pdc_to_thermal(problem: &FitProblem, max_iters: usize, tol: f64) -> Result<FitResult> {
    fit_with_options(problem, &FitOptions { max_iters, tol, ..FitOptions::default() })
}

/// Fit with explicit options. With several starts the best result wins; ties
/// keep the earlier start.
pub fn fit_with_options(problem: &FitProblem, options: &FitOptions) -> Result<FitResult> {
    if options.max_iters == 0 {
        return Err(Error::InvalidInput("max_iters must be ≥ 1".into()));
    }
    if !(options.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol {} must be > 0", options.tol)));
    }
    if !(options.initial_step > 0.0 && options.initial_step <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "initial_step {} must lie in (0, 1]",
            options.initial_step
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best: Option<FitResult> = None;
    for start in 0..options.starts.max(1) {
        let x0 = if start == 0 {
            problem.unit_coords(&problem.initial)
        } else {
            (0..problem.free.len()).map(|_| rng.gen_range(0.0..=1.0)).collect()
        };
        let result = run_from(problem, &x0, options)?;
        if best.as_ref().is_none_or(|b| result.objective_value < b.objective_value) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one start"))
}

fn run_from(problem: &FitProblem, x0: &[f64], options: &FitOptions) -> Result<FitResult> {
    let objective = |x: &[f64]| -> Result<f64> {
        let p = problem.params_at(x);
        let value = fit_objective(&p, problem)?;
        if !value.is_finite() {
            return Err(Error::FitDiverged { params: vec![p.pump_freq, p.signal_center, p.entanglement_time, p.gain] });
        }
        Ok(value)
    };
    let out = simplex::minimize(objective, x0, options.initial_step, options.max_iters, options.tol)?;
    Ok(FitResult {
        params: problem.params_at(&out.best),
        objective_value: out.value,
        iterations: out.iterations,
        converged: out.converged,
        trace: out.trace,
    })
}
