mod common;

use proptest::prelude::*;
use pseudosun::{
    coincidence_signal, evolve_heralded, evolve_unconditional, heralded_field, mean_photon_number,
    normalize_trajectory, FieldMethod, FrequencyGrid, Level, MolecularSystem, Normalization, PdcParams, TimeGrid,
};

fn molecule() -> impl Strategy<Value = MolecularSystem> {
    prop::collection::vec((14000.0f64..22000.0, -2.0f64..2.0), 1..4).prop_map(|ls| {
        MolecularSystem::new(ls.into_iter().map(|(e, d)| Level { transition_energy: e, dipole: d }).collect()).unwrap()
    })
}

fn source() -> impl Strategy<Value = PdcParams> {
    (12000.0f64..20000.0, 1.0f64..60.0, 0.01f64..0.8)
        .prop_map(|(center, te, gain)| PdcParams::new(30000.0, center, te, gain).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unconditional_trajectories_are_hermitian_and_psd(mol in molecule(), p in source(), tmax in 5.0f64..150.0) {
        let grid = FrequencyGrid::new(1000.0, 30000.0, 1024).unwrap();
        let times = TimeGrid::new(0.0, tmax, 40).unwrap();
        let traj = evolve_unconditional(&mol, &mean_photon_number(&grid, &p).unwrap(), &times).unwrap();
        let traj = normalize_trajectory(&traj, Normalization::MaxDiag).unwrap();
        let v = common::invariant_violations("unconditional", &traj, false);
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn heralded_trajectories_are_pure(mol in molecule(), p in source(), ti in 0.0f64..100.0) {
        let times = TimeGrid::new(0.0, 150.0, 301).unwrap();
        let grid = FrequencyGrid::new(1.0, 2.0, 2).unwrap();
        let field = heralded_field(&times, ti, &p, &grid, FieldMethod::RectApprox).unwrap();
        let traj = evolve_heralded(&mol, &field).unwrap();
        let v = common::invariant_violations("heralded", traj.trajectory(), true);
        prop_assert!(v.is_empty(), "{:?}", v);
        let s = coincidence_signal(&mol, &traj, &p).unwrap();
        prop_assert!(s.imaginary_residual < 1e-10);
        prop_assert!(s.values.iter().all(|x| *x >= -1e-12 * s.values.iter().fold(0.0f64, |a, b| a.max(b.abs()))));
    }

    #[test]
    fn normalization_is_idempotent(mol in molecule(), p in source(), factor in 1e-6f64..1e6) {
        let grid = FrequencyGrid::new(1000.0, 30000.0, 512).unwrap();
        let times = TimeGrid::new(0.0, 80.0, 21).unwrap();
        let traj = evolve_unconditional(&mol, &mean_photon_number(&grid, &p).unwrap(), &times).unwrap();
        let once = normalize_trajectory(&traj, Normalization::MaxDiag).unwrap();
        let twice = normalize_trajectory(&once, Normalization::MaxDiag).unwrap();
        let scaled = normalize_trajectory(&traj.scaled(factor), Normalization::MaxDiag).unwrap();
        for ((a, b), c) in once.matrices().iter().zip(twice.matrices()).zip(scaled.matrices()) {
            prop_assert!((a - b).iter().all(|z| z.norm() < 1e-12));
            prop_assert!((a - c).iter().all(|z| z.norm() < 1e-12));
        }
    }
}

#[test]
fn single_level_coincidence_tracks_the_population() {
    let mol = MolecularSystem::new(vec![Level { transition_energy: 18000.0, dipole: 0.7 }]).unwrap();
    let p = PdcParams::new(25000.0, 18001.0, 50.0, 0.11).unwrap();
    let times = TimeGrid::new(0.0, 200.0, 401).unwrap();
    let grid = FrequencyGrid::new(1.0, 2.0, 2).unwrap();
    let field = heralded_field(&times, 100.0, &p, &grid, FieldMethod::RectApprox).unwrap();
    let traj = evolve_heralded(&mol, &field).unwrap();
    let s = coincidence_signal(&mol, &traj, &p).unwrap();
    let rho = traj.trajectory().element(0, 0);
    let k = s.values.iter().zip(&rho).find(|(_, r)| r.re > 0.0).map(|(v, r)| v / r.re).unwrap();
    for (v, r) in s.values.iter().zip(&rho) {
        assert!((v - k * r.re).abs() <= 1e-12 * k * rho.iter().fold(0.0f64, |a, z| a.max(z.re)));
    }
}
