use lmg_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { lmg_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn ensemble_lifecycle() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { lmg_ensemble_new(2, 1.0, 0.0, &mut e) }, LmgStatus::Ok);
    assert!(!e.is_null());

    let mut lz = 0.0;
    assert_eq!(unsafe { lmg_ensemble_log_partition(e, &mut lz) }, LmgStatus::Ok);
    assert!((lz - (2.0 + 2.0 * 1f64.cosh()).ln()).abs() < 1e-14);

    let mut f = 0.0;
    assert_eq!(unsafe { lmg_ensemble_free_energy(e, &mut f) }, LmgStatus::Ok);
    assert!((f + lz / 2.0).abs() < 1e-15);

    let mut m = LmgMoments::default();
    assert_eq!(unsafe { lmg_ensemble_moments(e, &mut m) }, LmgStatus::Ok);
    assert_eq!(m.mean_sz, 0.0);
    assert!((m.var_sz - 2.0 / (2.0 + 2.0 * 1f64.cosh())).abs() < 1e-15);

    let mut g = LmgMetric::default();
    assert_eq!(unsafe { lmg_ensemble_metric(e, &mut g) }, LmgStatus::Ok);
    assert!((g.g_hh - m.var_sz).abs() < 1e-15);
    assert!((g.g_bb - m.var_h / 4.0).abs() < 1e-15);

    let mut fd = LmgMetric::default();
    assert_eq!(unsafe { lmg_metric_fd(2, 1.0, 0.0, 0.0, &mut fd) }, LmgStatus::Ok);
    assert!((fd.g_bb - g.g_bb).abs() < 1e-7);

    unsafe { lmg_ensemble_free(e) };
    unsafe { lmg_ensemble_free(ptr::null_mut()) };
}

#[test]
fn invalid_input_maps_to_codes() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { lmg_ensemble_new(3, 1.0, 0.0, &mut e) }, LmgStatus::InvalidParams);
    assert!(e.is_null());
    assert!(last_error().contains("even"));

    let mut x = 0.0;
    assert_eq!(unsafe { lmg_ensemble_log_partition(ptr::null(), &mut x) }, LmgStatus::NullPointer);
    assert_eq!(unsafe { lmg_critical_beta(0.5, ptr::null_mut()) }, LmgStatus::NullPointer);
    assert_eq!(unsafe { lmg_critical_beta(1.5, &mut x) }, LmgStatus::Domain);

    let mut g = LmgMetric::default();
    assert_eq!(unsafe { lmg_limit_metric(1.0, 0.0, LMG_VARIANT_CORRECTED, &mut g) }, LmgStatus::Singular);
    assert!(last_error().contains("boundary"));
    assert_eq!(unsafe { lmg_limit_metric(2.0, 0.3, 7, &mut g) }, LmgStatus::InvalidParams);
    assert_eq!(unsafe { lmg_ricci_limit(2.0, 0.3, -1, &mut x) }, LmgStatus::InvalidParams);
    assert_eq!(unsafe { lmg_ricci_limit(0.5, 0.3, LMG_RICCI_CHRISTOFFEL, &mut x) }, LmgStatus::Domain);
    assert_eq!(unsafe { lmg_metric_fd(40, 3.0, 0.5, 0.5, &mut g) }, LmgStatus::Numeric);
}

#[test]
fn error_message_truncates_and_reports_length() {
    let mut x = 0.0;
    assert_eq!(unsafe { lmg_critical_beta(2.0, &mut x) }, LmgStatus::Domain);
    let full = unsafe { lmg_last_error(ptr::null_mut(), 0) };
    let mut small = [0x7f as std::ffi::c_char; 8];
    assert_eq!(unsafe { lmg_last_error(small.as_mut_ptr(), small.len()) }, full);
    assert_eq!(small[7], 0);
    assert_eq!(unsafe { CStr::from_ptr(small.as_ptr()) }.to_bytes().len(), 7);
}

#[test]
fn limit_quantities() {
    let mut bc = 0.0;
    assert_eq!(unsafe { lmg_critical_beta(0.5, &mut bc) }, LmgStatus::Ok);
    assert!((bc - 3f64.ln()).abs() < 1e-12);

    let mut p = LmgPhasePoint::default();
    assert_eq!(unsafe { lmg_classify(2.0, 0.3, &mut p) }, LmgStatus::Ok);
    assert_eq!(p.phase, LMG_PHASE_ORDERED);
    assert!((p.r - 0.957_504_024_077_268_9).abs() < 1e-12);
    assert_eq!(unsafe { lmg_classify(1.0, 2.0, &mut p) }, LmgStatus::Ok);
    assert_eq!(p.phase, LMG_PHASE_PARAMAGNETIC);

    let mut g = LmgMetric::default();
    assert_eq!(unsafe { lmg_limit_metric(2.0, 0.3, LMG_VARIANT_CORRECTED, &mut g) }, LmgStatus::Ok);
    assert_eq!(g.g_hh, 0.5);
    assert!((g.g_bb - 0.0229).abs() < 1e-4);

    let mut c = 0.0;
    assert_eq!(unsafe { lmg_reduced_metric(2.0, LMG_VARIANT_CORRECTED, &mut c) }, LmgStatus::Ok);
    assert!((c - 0.017663).abs() < 1e-6);

    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { lmg_ricci_limit(2.0, 0.0, LMG_RICCI_CHRISTOFFEL, &mut a) }, LmgStatus::Ok);
    assert_eq!(unsafe { lmg_ricci_limit(2.0, 0.0, LMG_RICCI_ORTHOGONAL, &mut b) }, LmgStatus::Ok);
    assert!(a < 0.0 && ((a - b) / b).abs() < 1e-4);
}

#[test]
fn spectrum_queries() {
    let mut e = 0.0;
    assert_eq!(unsafe { lmg_energy_level(2, 1, 1, 0.3, &mut e) }, LmgStatus::Ok);
    assert!((e - (-1.0 + 1.0 - 0.6)).abs() < 1e-15);
    let mut d = 0.0;
    assert_eq!(unsafe { lmg_log_multiplicity(4, 1, &mut d) }, LmgStatus::Ok);
    assert!((d - 3f64.ln()).abs() < 1e-15);
    assert_eq!(unsafe { lmg_log_multiplicity(4, 3, &mut d) }, LmgStatus::Domain);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(lmg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
