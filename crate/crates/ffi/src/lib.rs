//! C ABI for `pseudosun`.
//!
//! Objects are exposed as opaque handles created by `ps_*_new`/compute
//! functions and released with the matching `ps_*_free`. Every fallible call
//! returns a [`PsStatus`]; on failure a message is kept per thread and can be
//! copied out with [`ps_last_error_message`].

use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use pseudosun::heralded::{evolve_heralded, herald_frequency_grid, heralded_field, FieldMethod};
use pseudosun::{
    evolve_unconditional, mean_photon_number, normalize_trajectory, thermal_mean, DensityTrajectory, Error,
    FrequencyGrid, Level, MolecularSystem, Normalization, PdcParams, PhotonSpectrum, ThermalParams, TimeGrid,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    InvalidGrid = 1,
    InvalidParams = 2,
    InvalidInput = 3,
    CannotNormalize = 4,
    Precondition = 5,
    Numerical = 6,
    FitDiverged = 7,
    NullPointer = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// PDC source parameters (cm⁻¹, fs).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PsPdcParams {
    pub pump_freq: f64,
    pub signal_center: f64,
    pub entanglement_time: f64,
    pub gain: f64,
}

impl PsPdcParams {
    fn to_core(self) -> Result<PdcParams, Error> {
        PdcParams::new(self.pump_freq, self.signal_center, self.entanglement_time, self.gain)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsNormalization {
    Raw = 0,
    MaxRePartOffdiag = 1,
    MaxDiag = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsFieldMethod {
    ExactQuadrature = 0,
    RectApprox = 1,
}

/// Opaque photon spectrum.
pub struct PsSpectrum(PhotonSpectrum);

/// Opaque molecule.
pub struct PsMolecule(MolecularSystem);

/// Opaque density-matrix trajectory.
pub struct PsTrajectory(DensityTrajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PsStatus {
    match e {
        Error::InvalidGrid(_) => PsStatus::InvalidGrid,
        Error::InvalidParams(_) => PsStatus::InvalidParams,
        Error::InvalidInput(_) => PsStatus::InvalidInput,
        Error::CannotNormalize(_) => PsStatus::CannotNormalize,
        Error::Precondition(_) => PsStatus::Precondition,
        Error::Numerical(_) => PsStatus::Numerical,
        Error::FitDiverged { .. } => PsStatus::FitDiverged,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (PsStatus, String)>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside pseudosun".into());
            PsStatus::Panic
        }
    }
}

fn core(e: Error) -> (PsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PsStatus, String) {
    (PsStatus::NullPointer, format!("{what} is NULL"))
}

fn emit<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for NULL before computing `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (truncated and
/// NUL-terminated). Returns the full message length, 0 when there is none.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ps_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Mean PDC photon number on `count` points of `[min, max]` cm⁻¹.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ps_mean_photon_number(
    params: PsPdcParams,
    min: f64,
    max: f64,
    count: size_t,
    out: *mut *mut PsSpectrum,
) -> PsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params.to_core().map_err(core)?;
        let grid = FrequencyGrid::new(min, max, count).map_err(core)?;
        emit(out, PsSpectrum(mean_photon_number(&grid, &p).map_err(core)?));
        Ok(())
    })
}

/// Black-body occupation at `temperature` K on `count` points of `[min, max]` cm⁻¹.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ps_thermal_mean(
    temperature: f64,
    min: f64,
    max: f64,
    count: size_t,
    out: *mut *mut PsSpectrum,
) -> PsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = ThermalParams::new(temperature).map_err(core)?;
        let grid = FrequencyGrid::new(min, max, count).map_err(core)?;
        emit(out, PsSpectrum(thermal_mean(&grid, &t).map_err(core)?));
        Ok(())
    })
}

/// Number of grid points, 0 for NULL.
///
/// # Safety
/// `spectrum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_spectrum_len(spectrum: *const PsSpectrum) -> size_t {
    spectrum.as_ref().map_or(0, |s| s.0.values().len())
}

/// Copy up to `len` values into `buf`.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_spectrum_values(spectrum: *const PsSpectrum, buf: *mut f64, len: size_t) -> PsStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let v = s.0.values();
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len().min(len));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_spectrum_free(spectrum: *mut PsSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Molecule with `n` excited levels.
///
/// # Safety
/// `energies` and `dipoles` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_molecule_new(
    energies: *const f64,
    dipoles: *const f64,
    n: size_t,
    out: *mut *mut PsMolecule,
) -> PsStatus {
    guard(|| {
        if energies.is_null() || dipoles.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let e = std::slice::from_raw_parts(energies, n);
        let d = std::slice::from_raw_parts(dipoles, n);
        let levels = e.iter().zip(d).map(|(&transition_energy, &dipole)| Level { transition_energy, dipole }).collect();
        emit(out, PsMolecule(MolecularSystem::new(levels).map_err(core)?));
        Ok(())
    })
}

/// # Safety
/// `molecule` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_molecule_free(molecule: *mut PsMolecule) {
    if !molecule.is_null() {
        drop(Box::from_raw(molecule));
    }
}

/// Unconditional dynamics under a stationary spectrum on `count` points of
/// `[t_min, t_max]` fs, raw units.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_evolve_unconditional(
    molecule: *const PsMolecule,
    spectrum: *const PsSpectrum,
    t_min: f64,
    t_max: f64,
    count: size_t,
    out: *mut *mut PsTrajectory,
) -> PsStatus {
    guard(|| {
        let m = molecule.as_ref().ok_or_else(|| null("molecule"))?;
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let times = TimeGrid::new(t_min, t_max, count).map_err(core)?;
        emit(out, PsTrajectory(evolve_unconditional(&m.0, &s.0, &times).map_err(core)?));
        Ok(())
    })
}

/// Dynamics conditioned on an idler detected at `herald_time`, raw units.
/// The exact field uses the default frequency quadrature for the time window.
///
/// # Safety
/// `molecule` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_evolve_heralded(
    molecule: *const PsMolecule,
    params: PsPdcParams,
    t_min: f64,
    t_max: f64,
    count: size_t,
    herald_time: f64,
    method: PsFieldMethod,
    out: *mut *mut PsTrajectory,
) -> PsStatus {
    guard(|| {
        let m = molecule.as_ref().ok_or_else(|| null("molecule"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params.to_core().map_err(core)?;
        let times = TimeGrid::new(t_min, t_max, count).map_err(core)?;
        let max_lag = (t_min - herald_time).abs().max((t_max - herald_time).abs());
        let grid = herald_frequency_grid(&p, max_lag).map_err(core)?;
        let method = match method {
            PsFieldMethod::ExactQuadrature => FieldMethod::ExactQuadrature,
            PsFieldMethod::RectApprox => FieldMethod::RectApprox,
        };
        let field = heralded_field(&times, herald_time, &p, &grid, method).map_err(core)?;
        let traj = evolve_heralded(&m.0, &field).map_err(core)?;
        emit(out, PsTrajectory(traj.trajectory().clone()));
        Ok(())
    })
}

/// Rescale a trajectory in place.
///
/// # Safety
/// `trajectory` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_normalize(trajectory: *mut PsTrajectory, mode: PsNormalization) -> PsStatus {
    guard(|| {
        let t = trajectory.as_mut().ok_or_else(|| null("trajectory"))?;
        let mode = match mode {
            PsNormalization::Raw => Normalization::Raw,
            PsNormalization::MaxRePartOffdiag => Normalization::MaxRePartOffdiag,
            PsNormalization::MaxDiag => Normalization::MaxDiag,
        };
        t.0 = normalize_trajectory(&t.0, mode).map_err(core)?;
        Ok(())
    })
}

/// Number of time points, 0 for NULL.
///
/// # Safety
/// `trajectory` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_len(trajectory: *const PsTrajectory) -> size_t {
    trajectory.as_ref().map_or(0, |t| t.0.len())
}

/// Number of excited levels, 0 for NULL.
///
/// # Safety
/// `trajectory` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_dim(trajectory: *const PsTrajectory) -> size_t {
    trajectory.as_ref().map_or(0, |t| t.0.dim())
}

/// Time of sample `k` and element `(row, col)` of its density matrix.
///
/// # Safety
/// `trajectory` must be live; `t`, `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_element(
    trajectory: *const PsTrajectory,
    k: size_t,
    row: size_t,
    col: size_t,
    t: *mut f64,
    re: *mut f64,
    im: *mut f64,
) -> PsStatus {
    guard(|| {
        let traj = &trajectory.as_ref().ok_or_else(|| null("trajectory"))?.0;
        if t.is_null() || re.is_null() || im.is_null() {
            return Err(null("output pointer"));
        }
        if k >= traj.len() || row >= traj.dim() || col >= traj.dim() {
            return Err((
                PsStatus::OutOfRange,
                format!("({k}, {row}, {col}) outside {} samples of {}×{}", traj.len(), traj.dim(), traj.dim()),
            ));
        }
        let z = traj.matrices()[k][(row, col)];
        *t = traj.times().point(k);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_free(trajectory: *mut PsTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}
