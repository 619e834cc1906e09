//! Time series of excited-state density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::TimeGrid;

pub type DensityMatrix = DMatrix<Complex64>;

/// How a trajectory has been scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Absolute units with all constant prefactors dropped.
    Raw,
    /// Largest real part of any off-diagonal element over the trajectory is 1.
    MaxRePartOffdiag,
    /// Largest diagonal element over the trajectory is 1.
    MaxDiag,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::MaxRePartOffdiag => "max_repart_offdiag",
            Normalization::MaxDiag => "max_diag",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Normalization::Raw),
            "max_repart_offdiag" => Ok(Normalization::MaxRePartOffdiag),
            "max_diag" => Ok(Normalization::MaxDiag),
            other => Err(Error::InvalidInput(format!("unknown normalization mode `{other}`"))),
        }
    }
}

/// Density matrices over the excited-state manifold, one per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTrajectory {
    times: TimeGrid,
    matrices: Vec<DensityMatrix>,
    normalization: Normalization,
}

impl DensityTrajectory {
    pub fn new(times: TimeGrid, matrices: Vec<DensityMatrix>, normalization: Normalization) -> Result<Self> {
        if matrices.len() != times.len() {
            return Err(Error::InvalidInput(format!(
                "{} matrices for {} time points",
                matrices.len(),
                times.len()
            )));
        }
        let dim = matrices[0].nrows();
        if dim == 0 || matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::InvalidInput("matrices must be square with a common dimension".into()));
        }
        Ok(Self { times, matrices, normalization })
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn matrices(&self) -> &[DensityMatrix] {
        &self.matrices
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Number of excited levels.
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Time series of one matrix element.
    pub fn element(&self, row: usize, col: usize) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m[(row, col)]).collect()
    }

    /// Every matrix multiplied by the same positive real.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            times: self.times,
            matrices: self.matrices.iter().map(|m| m * Complex64::new(factor, 0.0)).collect(),
            normalization: self.normalization,
        }
    }

    /// Largest `|M - M†|` entry over the whole trajectory.
    pub fn max_hermiticity_error(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| {
                let d = m - m.adjoint();
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of any matrix, relative to the largest eigenvalue
    /// seen anywhere on the trajectory (zero for an all-zero trajectory).
    pub fn min_relative_eigenvalue(&self) -> f64 {
        let spectra: Vec<Vec<f64>> = self.matrices.iter().map(hermitian_eigenvalues).collect();
        let scale = spectra.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        spectra.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b)) / scale
    }

    /// Largest ratio of second-largest to largest eigenvalue over all time
    /// points with a non-zero matrix. Zero for a pure (rank-1) trajectory.
    pub fn max_rank_one_defect(&self) -> f64 {
        self.matrices
            .iter()
            .filter_map(|m| {
                let mut ev = hermitian_eigenvalues(m);
                ev.sort_by(|a, b| b.total_cmp(a));
                if ev[0] <= 0.0 {
                    return None;
                }
                Some(if ev.len() > 1 { ev[1].abs() / ev[0] } else { 0.0 })
            })
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &DensityMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Rescale a trajectory so that the reference quantity of `mode` peaks at 1.
///
/// `Raw` returns the input unchanged.
pub fn normalize_trajectory(traj: &DensityTrajectory, mode: Normalization) -> Result<DensityTrajectory> {
    let reference = match mode {
        Normalization::Raw => return Ok(traj.clone()),
        Normalization::MaxDiag => traj
            .matrices
            .iter()
            .flat_map(|m| (0..m.nrows()).map(move |i| m[(i, i)].re))
            .fold(f64::NEG_INFINITY, f64::max),
        Normalization::MaxRePartOffdiag => {
            if traj.dim() < 2 {
                return Err(Error::CannotNormalize(
                    "a single-level trajectory has no off-diagonal element".into(),
                ));
            }
            traj.matrices
                .iter()
                .flat_map(|m| {
                    let n = m.nrows();
                    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| m[(i, j)].re))
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
    };
    if !(reference.is_finite() && reference > 0.0) {
        return Err(Error::CannotNormalize(format!(
            "reference quantity for {} peaks at {reference}",
            mode.as_str()
        )));
    }
    let mut out = traj.scaled(1.0 / reference);
    out.normalization = mode;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> DensityTrajectory {
        let times = TimeGrid::new(0.0, 2.0, 3).unwrap();
        let mats = (0..3)
            .map(|k| {
                let t = k as f64;
                let v = nalgebra::DVector::from_vec(vec![
                    Complex64::new(t, 0.0),
                    Complex64::from_polar(0.5 * t, 0.3 * t),
                ]);
                &v * v.adjoint()
            })
            .collect();
        DensityTrajectory::new(times, mats, Normalization::Raw).unwrap()
    }

    #[test]
    fn normalization_is_idempotent_and_scale_invariant() {
        let t = toy();
        for mode in [Normalization::MaxDiag, Normalization::MaxRePartOffdiag] {
            let n1 = normalize_trajectory(&t, mode).unwrap();
            let n2 = normalize_trajectory(&n1, mode).unwrap();
            let n3 = normalize_trajectory(&t.scaled(7.3), mode).unwrap();
            for ((a, b), c) in n1.matrices().iter().zip(n2.matrices()).zip(n3.matrices()) {
                assert!((a - b).iter().all(|z| z.norm() < 1e-12));
                assert!((a - c).iter().all(|z| z.norm() < 1e-12));
            }
            assert_eq!(n1.normalization(), mode);
        }
    }

    #[test]
    fn max_diag_peak_is_one() {
        let n = normalize_trajectory(&toy(), Normalization::MaxDiag).unwrap();
        let peak = n.element(0, 0).iter().map(|z| z.re).fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_reference_cannot_normalize() {
        let times = TimeGrid::new(0.0, 1.0, 2).unwrap();
        let z = DensityTrajectory::new(times, vec![DensityMatrix::zeros(2, 2); 2], Normalization::Raw).unwrap();
        assert!(matches!(normalize_trajectory(&z, Normalization::MaxDiag), Err(Error::CannotNormalize(_))));
        let single = DensityTrajectory::new(
            times,
            vec![DensityMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)); 2],
            Normalization::Raw,
        )
        .unwrap();
        assert!(normalize_trajectory(&single, Normalization::MaxRePartOffdiag).is_err());
    }

    #[test]
    fn structural_checks_on_pure_states() {
        let t = toy();
        assert!(t.max_hermiticity_error() < 1e-15);
        assert!(t.min_relative_eigenvalue() > -1e-12);
        assert!(t.max_rank_one_defect() < 1e-12);
    }

    #[test]
    fn parse_modes() {
        for m in [Normalization::Raw, Normalization::MaxDiag, Normalization::MaxRePartOffdiag] {
            assert_eq!(m.as_str().parse::<Normalization>().unwrap(), m);
        }
        assert!("max".parse::<Normalization>().is_err());
    }
}
