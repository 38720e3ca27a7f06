//! C ABI for the sgsim library.
//!
//! Handles (`SgParams`, `SgRng`) are opaque heap allocations owned by the
//! caller and released with the matching `_free` function. Every fallible
//! call returns an `SgStatus`; outputs are written through pointers only
//! on `SgStatus::Ok`. Strings returned by the library are NUL-terminated,
//! heap-allocated, and must be released with `sg_string_free`.
//!
//! The generated C header lives at `include/sgsim.h`.

use std::ffi::{c_char, CStr, CString};

use sgsim::boxes::{assemblage, make_psi2, nonsignaling_check, steering_distinguishability};
use sgsim::measurement::{measure, outcome_probabilities, Location, Setting, SpinLabel, StateForm};
use sgsim::numerics::RngStream;
use sgsim::protocol::{
    run_experiment, serialize_records, Format, Model, RunConfig, Schedule,
};
use sgsim::wavefunction::{
    branch_overlap, position_pdf_z, schrodinger_residual, PhysParams, ZGrid,
};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
}

/// Measurement setting selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgSetting {
    PositionZ = 0,
    SpinZ = 1,
    SpinX = 2,
    MomentumZ = 3,
}

impl From<SgSetting> for Setting {
    fn from(s: SgSetting) -> Setting {
        match s {
            SgSetting::PositionZ => Setting::PositionZ,
            SgSetting::SpinZ => Setting::SpinZ,
            SgSetting::SpinX => Setting::SpinX,
            SgSetting::MomentumZ => Setting::MomentumZ,
        }
    }
}

/// Structural form of the collapsed state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgForm {
    PositionEigenstate = 0,
    SingleBranchGaussian = 1,
    BranchSuperposition = 2,
    MomentumEigenstate = 3,
}

/// Spin label of the collapsed state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgSpin {
    UpZ = 0,
    DownZ = 1,
    UpX = 2,
    DownX = 3,
}

/// Where the collapsed state lives.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgLocation {
    Tokyo = 0,
    Paris = 1,
    Delocalized = 2,
}

/// One sampled measurement: Alice's reading plus the collapsed-state
/// labels. `detected_locally == false` means her device registered
/// nothing and `value` is the inferred remote eigenvalue.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SgOutcome {
    pub value: f64,
    pub detected_locally: bool,
    pub form: SgForm,
    pub spin: SgSpin,
    pub location: SgLocation,
}

/// Opaque physical-parameter handle.
pub struct SgParams(PhysParams);

/// Opaque deterministic random stream handle.
pub struct SgRng(RngStream);

fn form_code(form: StateForm) -> SgForm {
    match form {
        StateForm::PositionEigenstate => SgForm::PositionEigenstate,
        StateForm::SingleBranchGaussian => SgForm::SingleBranchGaussian,
        StateForm::BranchSuperposition => SgForm::BranchSuperposition,
        StateForm::MomentumEigenstate => SgForm::MomentumEigenstate,
    }
}

fn spin_code(spin: SpinLabel) -> SgSpin {
    match spin {
        SpinLabel::UpZ => SgSpin::UpZ,
        SpinLabel::DownZ => SgSpin::DownZ,
        SpinLabel::UpX => SgSpin::UpX,
        SpinLabel::DownX => SgSpin::DownX,
    }
}

fn location_code(location: Location) -> SgLocation {
    match location {
        Location::Tokyo => SgLocation::Tokyo,
        Location::Paris => SgLocation::Paris,
        Location::Delocalized => SgLocation::Delocalized,
    }
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// New parameter handle with the dimensionless defaults
/// (hbar = m = mu_c = b = sigma0 = 1, B0 = k_y = 0).
#[no_mangle]
pub extern "C" fn sg_params_new() -> *mut SgParams {
    Box::into_raw(Box::new(SgParams(PhysParams::default())))
}

/// New parameter handle with illustrative silver-atom-like SI magnitudes.
#[no_mangle]
pub extern "C" fn sg_params_new_silver_like() -> *mut SgParams {
    Box::into_raw(Box::new(SgParams(PhysParams::silver_like())))
}

/// Release a parameter handle. NULL is a no-op.
///
/// # Safety
/// `params` must be NULL or a pointer previously returned by one of the
/// `sg_params_new*` functions, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_params_free(params: *mut SgParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Set one field by name ("mu_c", "b", "b0", "m", "sigma0", "hbar",
/// "k_y"). The value is validated together with the rest of the record.
///
/// # Safety
/// `params` must be a live handle; `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sg_params_set(
    params: *mut SgParams,
    key: *const c_char,
    value: f64,
) -> SgStatus {
    if params.is_null() || key.is_null() {
        return SgStatus::NullPointer;
    }
    let key = match CStr::from_ptr(key).to_str() {
        Ok(k) => k,
        Err(_) => return SgStatus::InvalidArgument,
    };
    let handle = &mut (*params).0;
    let mut candidate = *handle;
    if candidate.set_field(key, value).is_err() {
        return SgStatus::InvalidArgument;
    }
    if candidate.validate().is_err() {
        return SgStatus::InvalidArgument;
    }
    *handle = candidate;
    SgStatus::Ok
}

/// Read one field by name.
///
/// # Safety
/// `params` must be a live handle; `key` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_params_get(
    params: *const SgParams,
    key: *const c_char,
    out: *mut f64,
) -> SgStatus {
    if params.is_null() || key.is_null() || out.is_null() {
        return SgStatus::NullPointer;
    }
    let key = match CStr::from_ptr(key).to_str() {
        Ok(k) => k,
        Err(_) => return SgStatus::InvalidArgument,
    };
    match (*params).0.get_field(key) {
        Ok(v) => {
            *out = v;
            SgStatus::Ok
        }
        Err(_) => SgStatus::InvalidArgument,
    }
}

/// New deterministic stream for (seed, stream_id).
#[no_mangle]
pub extern "C" fn sg_rng_new(seed: u64, stream_id: u64) -> *mut SgRng {
    Box::into_raw(Box::new(SgRng(RngStream::new(seed, stream_id))))
}

/// Release a stream handle. NULL is a no-op.
///
/// # Safety
/// `rng` must be NULL or a pointer previously returned by `sg_rng_new`,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_rng_free(rng: *mut SgRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Next uniform draw in [0, 1).
///
/// # Safety
/// `rng` must be a live stream handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_rng_uniform(rng: *mut SgRng, out: *mut f64) -> SgStatus {
    if rng.is_null() || out.is_null() {
        return SgStatus::NullPointer;
    }
    *out = (*rng).0.uniform();
    SgStatus::Ok
}

/// Spatial density in z at time t, with its spin-resolved parts.
///
/// # Safety
/// `params` must be a live handle; the three outputs writable.
#[no_mangle]
pub unsafe extern "C" fn sg_position_pdf(
    params: *const SgParams,
    t: f64,
    z: f64,
    out_total: *mut f64,
    out_up: *mut f64,
    out_down: *mut f64,
) -> SgStatus {
    if params.is_null() || out_total.is_null() || out_up.is_null() || out_down.is_null() {
        return SgStatus::NullPointer;
    }
    if !(t >= 0.0 && t.is_finite() && z.is_finite()) {
        return SgStatus::InvalidArgument;
    }
    let triple = position_pdf_z(z, t, &(*params).0);
    *out_total = triple.total;
    *out_up = triple.up_part;
    *out_down = triple.down_part;
    SgStatus::Ok
}

/// Complex overlap <phi_plus|phi_minus> at time t.
///
/// # Safety
/// `params` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_branch_overlap(
    params: *const SgParams,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SgStatus {
    if params.is_null() || out_re.is_null() || out_im.is_null() {
        return SgStatus::NullPointer;
    }
    if !(t >= 0.0 && t.is_finite()) {
        return SgStatus::InvalidArgument;
    }
    let ov = branch_overlap(t, &(*params).0);
    *out_re = ov.re;
    *out_im = ov.im;
    SgStatus::Ok
}

/// Outcome probabilities of a setting at time t. The first slot is the
/// Tokyo side for position/momentum and +hbar/2 for the spin settings.
///
/// # Safety
/// `params` must be a live handle; `out_first`, `out_second` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_outcome_probabilities(
    params: *const SgParams,
    setting: SgSetting,
    t: f64,
    out_first: *mut f64,
    out_second: *mut f64,
) -> SgStatus {
    if params.is_null() || out_first.is_null() || out_second.is_null() {
        return SgStatus::NullPointer;
    }
    if !(t >= 0.0 && t.is_finite()) {
        return SgStatus::InvalidArgument;
    }
    let probs = outcome_probabilities(setting.into(), t, &(*params).0);
    *out_first = probs[0].1;
    *out_second = probs[1].1;
    SgStatus::Ok
}

/// Sample one measurement, advancing the stream.
///
/// # Safety
/// `params` and `rng` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_measure(
    params: *const SgParams,
    setting: SgSetting,
    t: f64,
    rng: *mut SgRng,
    out: *mut SgOutcome,
) -> SgStatus {
    if params.is_null() || rng.is_null() || out.is_null() {
        return SgStatus::NullPointer;
    }
    if !(t >= 0.0 && t.is_finite()) {
        return SgStatus::InvalidArgument;
    }
    let (outcome, collapsed) = measure(setting.into(), t, &(*params).0, &mut (*rng).0);
    *out = SgOutcome {
        value: outcome.value,
        detected_locally: outcome.detected_locally,
        form: form_code(collapsed.form()),
        spin: spin_code(collapsed.spin_label()),
        location: location_code(collapsed.location()),
    };
    SgStatus::Ok
}

/// Relative Schroedinger residual of the 1-D z-restriction on a uniform
/// grid (at least 64 points).
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_schrodinger_residual(
    params: *const SgParams,
    t: f64,
    z_min: f64,
    z_max: f64,
    points: usize,
    out: *mut f64,
) -> SgStatus {
    if params.is_null() || out.is_null() {
        return SgStatus::NullPointer;
    }
    match schrodinger_residual(t, ZGrid::new(z_min, z_max, points), &(*params).0) {
        Ok(r) => {
            *out = r;
            SgStatus::Ok
        }
        Err(sgsim::Error::QuadratureNonConvergence { .. }) => SgStatus::NumericalFailure,
        Err(_) => SgStatus::InvalidArgument,
    }
}

/// Largest deviation of the discrete boxes model's setting-averaged path
/// marginals across the three settings (quantum non-signaling pins this
/// to zero).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_boxes_nonsignaling_deviation(out: *mut f64) -> SgStatus {
    if out.is_null() {
        return SgStatus::NullPointer;
    }
    let psi2 = make_psi2();
    match nonsignaling_check(
        &psi2,
        &[Setting::PositionZ, Setting::SpinZ, Setting::SpinX],
    ) {
        Ok(dev) => {
            *out = dev;
            SgStatus::Ok
        }
        Err(_) => SgStatus::NumericalFailure,
    }
}

/// Max-min trace distance between the PositionZ and SpinX assemblages of
/// the shared discrete state (the steering signature, sqrt(3)/2).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_boxes_steering_distance(out: *mut f64) -> SgStatus {
    if out.is_null() {
        return SgStatus::NullPointer;
    }
    let psi2 = make_psi2();
    let pos = match assemblage(&psi2, Setting::PositionZ) {
        Ok(a) => a,
        Err(_) => return SgStatus::NumericalFailure,
    };
    let x = match assemblage(&psi2, Setting::SpinX) {
        Ok(a) => a,
        Err(_) => return SgStatus::NumericalFailure,
    };
    *out = steering_distinguishability(&pos, &x).max_min_distance;
    SgStatus::Ok
}

/// Run the steering protocol with a fixed setting for every atom and
/// return the CSV record stream as a NUL-terminated string (release it
/// with `sg_string_free`).
///
/// # Safety
/// `params` must be a live handle and `out_csv` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_protocol_run_csv(
    params: *const SgParams,
    n_atoms: u64,
    setting: SgSetting,
    t: f64,
    seed: u64,
    out_csv: *mut *mut c_char,
) -> SgStatus {
    if params.is_null() || out_csv.is_null() {
        return SgStatus::NullPointer;
    }
    let config = RunConfig {
        n_atoms,
        schedule: Schedule::Fixed(setting.into()),
        evolution_time: t,
        params: (*params).0,
        seed,
        model: Model::Continuous,
    };
    let records = match run_experiment(&config) {
        Ok((records, _)) => records,
        Err(_) => return SgStatus::InvalidArgument,
    };
    let bytes = serialize_records(&records, Format::Csv);
    match CString::new(bytes) {
        Ok(s) => {
            *out_csv = s.into_raw();
            SgStatus::Ok
        }
        Err(_) => SgStatus::NumericalFailure,
    }
}

/// Release a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by this library,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn version_is_static_and_null_terminated() {
        let v = unsafe { CStr::from_ptr(sg_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn params_lifecycle_and_field_access() {
        let params = sg_params_new();
        let key = CString::new("mu_c").unwrap();
        let mut value = 0.0;
        unsafe {
            assert_eq!(sg_params_get(params, key.as_ptr(), &mut value), SgStatus::Ok);
            assert_eq!(value, 1.0);
            assert_eq!(sg_params_set(params, key.as_ptr(), 2.5), SgStatus::Ok);
            assert_eq!(sg_params_get(params, key.as_ptr(), &mut value), SgStatus::Ok);
            assert_eq!(value, 2.5);

            let bad_key = CString::new("nope").unwrap();
            assert_eq!(
                sg_params_set(params, bad_key.as_ptr(), 1.0),
                SgStatus::InvalidArgument
            );
            // Invalid values leave the record untouched.
            let sigma = CString::new("sigma0").unwrap();
            assert_eq!(
                sg_params_set(params, sigma.as_ptr(), 0.0),
                SgStatus::InvalidArgument
            );
            assert_eq!(sg_params_get(params, sigma.as_ptr(), &mut value), SgStatus::Ok);
            assert_eq!(value, 1.0);

            sg_params_free(params);
        }
    }

    #[test]
    fn null_pointers_are_rejected() {
        let mut out = 0.0;
        unsafe {
            assert_eq!(
                sg_position_pdf(std::ptr::null(), 1.0, 0.0, &mut out, &mut out, &mut out),
                SgStatus::NullPointer
            );
            assert_eq!(
                sg_rng_uniform(std::ptr::null_mut(), &mut out),
                SgStatus::NullPointer
            );
            assert_eq!(sg_boxes_nonsignaling_deviation(std::ptr::null_mut()), SgStatus::NullPointer);
        }
    }

    #[test]
    fn pdf_and_overlap_round_trip_through_the_abi() {
        let params = sg_params_new();
        let (mut total, mut up, mut down) = (0.0, 0.0, 0.0);
        let (mut re, mut im) = (0.0, 0.0);
        unsafe {
            assert_eq!(
                sg_position_pdf(params, 0.0, 0.0, &mut total, &mut up, &mut down),
                SgStatus::Ok
            );
            assert!((total - (up + down)).abs() < 1e-15);
            assert!((up - down).abs() < 1e-15);

            assert_eq!(sg_branch_overlap(params, 0.0, &mut re, &mut im), SgStatus::Ok);
            assert!((re - 1.0).abs() < 1e-12);
            assert!(im.abs() < 1e-12);

            assert_eq!(
                sg_branch_overlap(params, -1.0, &mut re, &mut im),
                SgStatus::InvalidArgument
            );
            sg_params_free(params);
        }
    }

    #[test]
    fn measurement_stream_is_deterministic() {
        let params = sg_params_new();
        unsafe {
            let mut outcomes = Vec::new();
            for _ in 0..2 {
                let rng = sg_rng_new(42, 7);
                let mut run = Vec::new();
                for _ in 0..32 {
                    let mut out = SgOutcome {
                        value: 0.0,
                        detected_locally: false,
                        form: SgForm::PositionEigenstate,
                        spin: SgSpin::UpZ,
                        location: SgLocation::Tokyo,
                    };
                    assert_eq!(
                        sg_measure(params, SgSetting::SpinZ, 1.0, rng, &mut out),
                        SgStatus::Ok
                    );
                    assert_eq!(out.form, SgForm::SingleBranchGaussian);
                    run.push((out.value, out.detected_locally, out.spin, out.location));
                }
                sg_rng_free(rng);
                outcomes.push(run);
            }
            assert_eq!(outcomes[0], outcomes[1]);
            sg_params_free(params);
        }
    }

    #[test]
    fn probabilities_and_scalars_through_the_abi() {
        let params = sg_params_new();
        let (mut first, mut second) = (0.0, 0.0);
        unsafe {
            assert_eq!(
                sg_outcome_probabilities(params, SgSetting::SpinX, 0.0, &mut first, &mut second),
                SgStatus::Ok
            );
            assert_eq!(first, 1.0);
            assert_eq!(second, 0.0);

            let mut dev = 1.0;
            assert_eq!(sg_boxes_nonsignaling_deviation(&mut dev), SgStatus::Ok);
            assert!(dev < 1e-12);

            let mut d = 0.0;
            assert_eq!(sg_boxes_steering_distance(&mut d), SgStatus::Ok);
            assert!((d - 3.0f64.sqrt() / 2.0).abs() < 1e-9);

            sg_params_free(params);
        }
    }

    #[test]
    fn residual_through_the_abi() {
        let params = sg_params_new();
        let mut r = 0.0;
        unsafe {
            assert_eq!(
                sg_schrodinger_residual(params, 1.0, -12.0, 12.0, 512, &mut r),
                SgStatus::Ok
            );
            assert!(r.is_finite() && r < 1.0);
            assert_eq!(
                sg_schrodinger_residual(params, 1.0, -12.0, 12.0, 16, &mut r),
                SgStatus::InvalidArgument
            );
            sg_params_free(params);
        }
    }

    #[test]
    fn protocol_csv_through_the_abi() {
        let params = sg_params_new();
        unsafe {
            let mut bufs = Vec::new();
            for _ in 0..2 {
                let mut csv: *mut c_char = std::ptr::null_mut();
                assert_eq!(
                    sg_protocol_run_csv(params, 200, SgSetting::SpinZ, 1.0, 99, &mut csv),
                    SgStatus::Ok
                );
                let text = CStr::from_ptr(csv).to_str().unwrap().to_string();
                sg_string_free(csv);
                bufs.push(text);
            }
            assert_eq!(bufs[0], bufs[1]);
            assert!(bufs[0].starts_with("atom_index,setting,alice_detected"));
            assert_eq!(bufs[0].lines().count(), 201);

            let mut csv: *mut c_char = std::ptr::null_mut();
            assert_eq!(
                sg_protocol_run_csv(params, 0, SgSetting::SpinZ, 1.0, 99, &mut csv),
                SgStatus::InvalidArgument
            );
            sg_params_free(params);
        }
    }
}
