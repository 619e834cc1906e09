//! Photon statistics of CW parametric down-conversion as a stand-in for
//! sunlight, and the first-order molecular dynamics it drives, with and
//! without heralding of the idler photon.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod heralded;
pub mod numerics;
pub mod pdc;
mod simplex;
pub mod trajectory;

pub use dynamics::{correlation_cw, evolve_under_blackbody, evolve_unconditional, Level, MolecularSystem};
pub use error::{Error, Result};
pub use fit::{
    fit_objective, fit_pdc_to_thermal, fit_with_options, FitOptions, FitParam, FitProblem, FitResult, FitTarget,
    FreeParam,
};
pub use heralded::{
    average_over_heralds, average_over_heralds_with, coincidence_signal, evolve_heralded, heralded_field,
    AveragingOptions, CoincidenceSignal, FieldMethod, HeraldSampling, HeraldedField, HeraldedTrajectory,
};
pub use numerics::{FrequencyGrid, TimeGrid};
pub use pdc::{
    mean_photon_number, photon_number_pmf, squeeze_profile, thermal_mean, PdcParams, PhotonSpectrum,
    ThermalParams,
};
pub use trajectory::{normalize_trajectory, DensityMatrix, DensityTrajectory, Normalization};
