//! JSON run configuration. Every block rejects unknown keys, and
//! `validate_*` methods turn raw blocks into checked domain types.

use serde::Deserialize;

use crate::dynamics::{Level, MolecularSystem};
use crate::error::Result;
use crate::fit::{FitOptions, FitParam, FitProblem, FitTarget, FreeParam};
use crate::heralded::{AveragingOptions, FieldMethod, HeraldSampling};
use crate::numerics::{FrequencyGrid, TimeGrid};
use crate::pdc::{PdcParams, ThermalParams};
use crate::trajectory::Normalization;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spectrum: Option<SpectrumConfig>,
    pub fit: Option<FitConfig>,
    pub dynamics: Option<DynamicsConfig>,
    pub heralded: Option<HeraldedConfig>,
    pub coincidence: Option<CoincidenceConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdcBlock {
    pub pump_freq: f64,
    pub signal_center: f64,
    pub entanglement_time: f64,
    pub gain: f64,
}

impl PdcBlock {
    pub fn validate(&self) -> Result<PdcParams> {
        PdcParams::new(self.pump_freq, self.signal_center, self.entanglement_time, self.gain)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalBlock {
    pub temperature: f64,
}

impl ThermalBlock {
    pub fn validate(&self) -> Result<ThermalParams> {
        ThermalParams::new(self.temperature)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridBlock {
    pub fn frequency(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.min, self.max, self.count)
    }

    pub fn time(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelBlock {
    pub transition_energy: f64,
    pub dipole: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeBlock {
    pub levels: Vec<LevelBlock>,
}

impl MoleculeBlock {
    pub fn validate(&self) -> Result<MolecularSystem> {
        MolecularSystem::new(
            self.levels
                .iter()
                .map(|l| Level { transition_energy: l.transition_energy, dipole: l.dipole })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub pdc: PdcBlock,
    #[serde(default = "default_thermal")]
    pub thermal: ThermalBlock,
    pub grid: GridBlock,
}

fn default_thermal() -> ThermalBlock {
    ThermalBlock { temperature: ThermalParams::default().temperature }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum TargetBlock {
    Thermal(ThermalBlock),
    Pdc(PdcBlock),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParamBlock {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub initial: PdcBlock,
    pub target: TargetBlock,
    #[serde(default = "default_window")]
    pub window: GridBlock,
    pub free: Vec<FreeParamBlock>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_initial_step")]
    pub initial_step: f64,
    #[serde(default = "default_starts")]
    pub starts: usize,
}

fn default_window() -> GridBlock {
    GridBlock { min: 14000.0, max: 22000.0, count: 801 }
}

fn default_max_iters() -> usize {
    FitOptions::default().max_iters
}

fn default_tol() -> f64 {
    FitOptions::default().tol
}

fn default_initial_step() -> f64 {
    FitOptions::default().initial_step
}

fn default_starts() -> usize {
    1
}

impl FitConfig {
    pub fn validate(&self, seed: u64) -> Result<(FitProblem, FitOptions)> {
        let target = match self.target {
            TargetBlock::Thermal(t) => FitTarget::Thermal(t.validate()?),
            TargetBlock::Pdc(p) => FitTarget::Pdc(p.validate()?),
        };
        let free = self
            .free
            .iter()
            .map(|f| Ok(FreeParam { param: f.param.parse::<FitParam>()?, lo: f.lo, hi: f.hi }))
            .collect::<Result<Vec<_>>>()?;
        let problem = FitProblem::new(self.window.frequency()?, target, free, self.initial.validate()?)?;
        let options = FitOptions {
            max_iters: self.max_iters,
            tol: self.tol,
            initial_step: self.initial_step,
            starts: self.starts,
            seed,
        };
        if options.max_iters == 0 || !(options.tol > 0.0) || !(options.initial_step > 0.0 && options.initial_step <= 1.0) {
            return Err(crate::Error::InvalidInput(
                "fit needs max_iters ≥ 1, tol > 0 and initial_step in (0, 1]".into(),
            ));
        }
        if options.starts == 0 {
            return Err(crate::Error::InvalidInput("fit needs starts ≥ 1".into()));
        }
        Ok((problem, options))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub molecule: MoleculeBlock,
    pub pdc: Option<PdcBlock>,
    pub thermal: Option<ThermalBlock>,
    #[serde(default = "default_dynamics_grid")]
    pub grid: GridBlock,
    pub times: GridBlock,
    #[serde(default = "default_dynamics_normalization")]
    pub normalization: String,
}

fn default_dynamics_grid() -> GridBlock {
    GridBlock { min: 1000.0, max: 25000.0, count: 8192 }
}

fn default_dynamics_normalization() -> String {
    Normalization::MaxRePartOffdiag.as_str().into()
}

pub struct Dynamics {
    pub molecule: MolecularSystem,
    pub pdc: Option<PdcParams>,
    pub thermal: Option<ThermalParams>,
    pub grid: FrequencyGrid,
    pub times: TimeGrid,
    pub normalization: Normalization,
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<Dynamics> {
        let d = Dynamics {
            molecule: self.molecule.validate()?,
            pdc: self.pdc.map(|p| p.validate()).transpose()?,
            thermal: self.thermal.map(|t| t.validate()).transpose()?,
            grid: self.grid.frequency()?,
            times: non_negative_times(&self.times)?,
            normalization: self.normalization.parse()?,
        };
        if d.pdc.is_none() && d.thermal.is_none() {
            return Err(crate::Error::InvalidInput("dynamics needs a `pdc` or `thermal` source".into()));
        }
        if d.grid.min() <= 0.0 {
            return Err(crate::Error::InvalidGrid("dynamics frequency grid must start above 0".into()));
        }
        Ok(d)
    }
}

fn non_negative_times(block: &GridBlock) -> Result<TimeGrid> {
    let t = block.time()?;
    if t.min() < 0.0 {
        return Err(crate::Error::InvalidGrid(format!(
            "times start at {} fs but the light is switched on at 0",
            t.min()
        )));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageBlock {
    pub samples: usize,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingBlock,
    #[serde(default)]
    pub padding: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingBlock {
    Uniform,
    Random,
}

fn default_sampling() -> SamplingBlock {
    SamplingBlock::Uniform
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeraldedConfig {
    pub molecule: MoleculeBlock,
    pub pdc: PdcBlock,
    pub times: GridBlock,
    #[serde(default)]
    pub herald_times: Vec<f64>,
    #[serde(default = "default_method")]
    pub method: String,
    /// Frequency grid for the exact field; derived from the source when absent.
    pub grid: Option<GridBlock>,
    #[serde(default = "default_heralded_normalization")]
    pub normalization: String,
    pub average: Option<AverageBlock>,
}

fn default_method() -> String {
    FieldMethod::ExactQuadrature.as_str().into()
}

fn default_heralded_normalization() -> String {
    Normalization::MaxDiag.as_str().into()
}

pub struct Heralded {
    pub molecule: MolecularSystem,
    pub pdc: PdcParams,
    pub times: TimeGrid,
    pub herald_times: Vec<f64>,
    pub method: FieldMethod,
    pub grid: Option<FrequencyGrid>,
    pub normalization: Normalization,
    pub average: Option<AveragingOptions>,
}

impl HeraldedConfig {
    pub fn validate(&self, seed: u64) -> Result<Heralded> {
        let method: FieldMethod = self.method.parse()?;
        let h = Heralded {
            molecule: self.molecule.validate()?,
            pdc: self.pdc.validate()?,
            times: non_negative_times(&self.times)?,
            herald_times: self.herald_times.clone(),
            method,
            grid: self.grid.map(|g| g.frequency()).transpose()?,
            normalization: self.normalization.parse()?,
            average: self
                .average
                .map(|a| -> Result<AveragingOptions> {
                    if a.samples == 0 {
                        return Err(crate::Error::InvalidInput("average.samples must be ≥ 1".into()));
                    }
                    if !(a.padding.is_finite() && a.padding >= 0.0) {
                        return Err(crate::Error::InvalidInput("average.padding must be ≥ 0".into()));
                    }
                    Ok(AveragingOptions {
                        samples: a.samples,
                        method,
                        sampling: match a.sampling {
                            SamplingBlock::Uniform => HeraldSampling::Uniform,
                            SamplingBlock::Random => HeraldSampling::Random { seed },
                        },
                        padding: a.padding,
                    })
                })
                .transpose()?,
        };
        if h.herald_times.is_empty() && h.average.is_none() {
            return Err(crate::Error::InvalidInput("heralded needs `herald_times` or `average`".into()));
        }
        if let Some(t) = h.herald_times.iter().find(|t| !t.is_finite()) {
            return Err(crate::Error::InvalidInput(format!("herald time {t} is not finite")));
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoincidenceConfig {
    pub molecule: MoleculeBlock,
    pub pdc: PdcBlock,
    pub times: GridBlock,
    pub herald_time: f64,
    #[serde(default = "default_method")]
    pub method: String,
    pub grid: Option<GridBlock>,
}

pub struct Coincidence {
    pub molecule: MolecularSystem,
    pub pdc: PdcParams,
    pub times: TimeGrid,
    pub herald_time: f64,
    pub method: FieldMethod,
    pub grid: Option<FrequencyGrid>,
}

impl CoincidenceConfig {
    pub fn validate(&self) -> Result<Coincidence> {
        if !self.herald_time.is_finite() {
            return Err(crate::Error::InvalidInput("herald_time is not finite".into()));
        }
        Ok(Coincidence {
            molecule: self.molecule.validate()?,
            pdc: self.pdc.validate()?,
            times: non_negative_times(&self.times)?,
            herald_time: self.herald_time,
            method: self.method.parse()?,
            grid: self.grid.map(|g| g.frequency()).transpose()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"spectrum": {"pdc": {"pump_freq": 1, "signal_center": 1, "entanglement_time": 1, "gain": 0.1, "extra": 1}, "grid": {"min": 1, "max": 2, "count": 3}}}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"spectra": {}}"#).is_err());
    }

    #[test]
    fn fit_target_is_tagged() {
        let t: TargetBlock = serde_json::from_str(r#"{"thermal": {"temperature": 5777}}"#).unwrap();
        assert!(matches!(t, TargetBlock::Thermal(_)));
    }

    #[test]
    fn negative_times_rejected() {
        let g = GridBlock { min: -1.0, max: 10.0, count: 11 };
        assert!(non_negative_times(&g).is_err());
    }
}
