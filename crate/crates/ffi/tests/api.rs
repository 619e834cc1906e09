use std::ffi::CStr;
use std::ptr;

use pseudosun_ffi::*;

fn visible_source() -> PsPdcParams {
    PsPdcParams { pump_freq: 25000.0, signal_center: 12000.0, entanglement_time: 2.5, gain: 0.15 }
}

fn last_error() -> String {
    let mut buf = vec![0 as libc::c_char; 256];
    let n = unsafe { ps_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ps_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn spectrum_round_trip() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_mean_photon_number(visible_source(), 11000.0, 13000.0, 3, &mut s) }, PsStatus::Ok);
    assert_eq!(unsafe { ps_spectrum_len(s) }, 3);
    let mut v = [0.0; 3];
    assert_eq!(unsafe { ps_spectrum_values(s, v.as_mut_ptr(), 3) }, PsStatus::Ok);
    assert!((v[1] - 0.15f64.sinh().powi(2)).abs() < 1e-15);
    unsafe { ps_spectrum_free(s) };
}

#[test]
fn invalid_params_set_status_and_message() {
    let mut s = ptr::null_mut();
    let bad = PsPdcParams { gain: 2.0, ..visible_source() };
    assert_eq!(unsafe { ps_mean_photon_number(bad, 1.0, 2.0, 3, &mut s) }, PsStatus::InvalidParams);
    assert!(s.is_null());
    assert!(last_error().contains("gain"));
    assert_eq!(unsafe { ps_thermal_mean(5777.0, 1.0, 2.0, 3, ptr::null_mut()) }, PsStatus::NullPointer);
}

#[test]
fn unconditional_and_heralded_dynamics() {
    let e = [18000.0, 18500.0];
    let d = [1.0, 1.0];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ps_molecule_new(e.as_ptr(), d.as_ptr(), 2, &mut m) }, PsStatus::Ok);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_thermal_mean(5777.0, 1000.0, 25000.0, 1024, &mut s) }, PsStatus::Ok);
    let mut tr = ptr::null_mut();
    assert_eq!(unsafe { ps_evolve_unconditional(m, s, 0.0, 100.0, 51, &mut tr) }, PsStatus::Ok);
    assert_eq!(unsafe { (ps_trajectory_len(tr), ps_trajectory_dim(tr)) }, (51, 2));
    assert_eq!(unsafe { ps_trajectory_normalize(tr, PsNormalization::MaxDiag) }, PsStatus::Ok);
    let (mut t, mut re, mut im) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { ps_trajectory_element(tr, 50, 0, 0, &mut t, &mut re, &mut im) }, PsStatus::Ok);
    assert_eq!(t, 100.0);
    assert!(re > 0.0 && re <= 1.0 && im.abs() < 1e-12);
    assert_eq!(unsafe { ps_trajectory_element(tr, 51, 0, 0, &mut t, &mut re, &mut im) }, PsStatus::OutOfRange);
    unsafe { ps_trajectory_free(tr) };

    let p = PsPdcParams { signal_center: 18001.0, entanglement_time: 50.0, gain: 0.11, ..visible_source() };
    let mut h = ptr::null_mut();
    let status = unsafe { ps_evolve_heralded(m, p, 0.0, 200.0, 2001, 100.0, PsFieldMethod::RectApprox, &mut h) };
    assert_eq!(status, PsStatus::Ok);
    assert_eq!(unsafe { ps_trajectory_normalize(h, PsNormalization::MaxDiag) }, PsStatus::Ok);
    let (mut r11, mut r22) = (0.0, 0.0);
    unsafe {
        ps_trajectory_element(h, 2000, 0, 0, &mut t, &mut r11, &mut im);
        ps_trajectory_element(h, 2000, 1, 1, &mut t, &mut r22, &mut im);
    }
    assert!((r11 - 1.0).abs() < 1e-12);
    assert!((r22 / r11 - 0.0917).abs() < 0.01 * 0.0917);

    let mut coarse = ptr::null_mut();
    let status =
        unsafe { ps_evolve_heralded(m, visible_source(), 0.0, 100.0, 101, 50.0, PsFieldMethod::ExactQuadrature, &mut coarse) };
    assert_eq!(status, PsStatus::InvalidInput);
    assert!(coarse.is_null());

    unsafe {
        ps_trajectory_free(h);
        ps_spectrum_free(s);
        ps_molecule_free(m);
        ps_molecule_free(ptr::null_mut());
    }
}

#[test]
fn single_level_cannot_use_offdiagonal_normalization() {
    let e = [18000.0];
    let d = [1.0];
    let mut m = ptr::null_mut();
    let mut s = ptr::null_mut();
    let mut tr = ptr::null_mut();
    unsafe {
        assert_eq!(ps_molecule_new(e.as_ptr(), d.as_ptr(), 1, &mut m), PsStatus::Ok);
        assert_eq!(ps_thermal_mean(5777.0, 1000.0, 25000.0, 256, &mut s), PsStatus::Ok);
        assert_eq!(ps_evolve_unconditional(m, s, 0.0, 10.0, 11, &mut tr), PsStatus::Ok);
        assert_eq!(ps_trajectory_normalize(tr, PsNormalization::MaxRePartOffdiag), PsStatus::CannotNormalize);
        ps_trajectory_free(tr);
        ps_spectrum_free(s);
        ps_molecule_free(m);
    }
}
