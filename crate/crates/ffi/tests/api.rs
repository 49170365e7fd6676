use std::ffi::{CStr, CString};
use std::ptr;

use leakshare_ffi::*;

fn field(l: u32) -> *mut LsField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ls_field_new(l, 0, &mut f) }, LsStatus::Ok);
    f
}

fn last_error() -> String {
    let p = ls_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn field_arithmetic() {
    let d = field(8);
    let mut f = ptr::null_mut();
    let (mut l, mut poly, mut v) = (0u32, 0u32, 0u32);
    unsafe {
        assert_eq!(ls_field_info(d, &mut l, &mut poly), LsStatus::Ok);
        assert_eq!((l, poly), (8, 0x11d));
        ls_field_free(d);
        assert_eq!(ls_field_new(8, 0x11b, &mut f), LsStatus::Ok);
        assert_eq!(ls_field_info(f, &mut l, &mut poly), LsStatus::Ok);
        assert_eq!((l, poly), (8, 0x11b));
        assert_eq!(ls_field_mul(f, 0x53, 0xca, &mut v), LsStatus::Ok);
        assert_eq!(v, 1);
        assert_eq!(ls_field_inv(f, 0x53, &mut v), LsStatus::Ok);
        assert_eq!(v, 0xca);
        assert_eq!(ls_field_inv(f, 0, &mut v), LsStatus::DivisionByZero);
        assert_eq!(ls_field_mul(f, 256, 1, &mut v), LsStatus::InvalidParameter);
        ls_field_free(f);
    }
}

#[test]
fn bad_fields_and_nulls() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(ls_field_new(3, 0b1001, &mut f), LsStatus::InvalidField);
        assert!(last_error().contains("reducible"));
        assert_eq!(ls_field_new(17, 0, &mut f), LsStatus::InvalidField);
        assert_eq!(ls_field_new(3, 0, ptr::null_mut()), LsStatus::NullPointer);
        let mut v = 0;
        assert_eq!(ls_field_mul(ptr::null(), 1, 1, &mut v), LsStatus::NullPointer);
        ls_field_free(ptr::null_mut());
    }
}

#[test]
fn error_message_clears_on_success() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(ls_binary_entropy(2.0, &mut v), LsStatus::Domain);
        assert!(!ls_last_error_message().is_null());
        assert_eq!(ls_binary_entropy(0.5, &mut v), LsStatus::Ok);
    }
    assert!(ls_last_error_message().is_null());
    assert_eq!(v, 1.0);
}

#[test]
fn shamir_round_trip() {
    let f = field(3);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ls_shamir_new(f, 3, 2, ptr::null(), &mut s), LsStatus::Ok);
        let mut shares = [0u32; 3];
        assert_eq!(ls_shamir_share(s, 5, [7u32].as_ptr(), 1, shares.as_mut_ptr(), 3), LsStatus::Ok);
        let mut out = 0;
        for pair in [[0usize, 1], [1, 2], [0, 2]] {
            let pts: Vec<u32> = pair.iter().map(|&i| i as u32 + 1).collect();
            let vals: Vec<u32> = pair.iter().map(|&i| shares[i]).collect();
            assert_eq!(ls_shamir_reconstruct(s, pts.as_ptr(), vals.as_ptr(), 2, &mut out), LsStatus::Ok);
            assert_eq!(out, 5);
        }
        assert_eq!(ls_shamir_reconstruct(s, [1u32].as_ptr(), shares.as_ptr(), 1, &mut out), LsStatus::ThresholdNotMet);

        let mut a = [0u32; 3];
        let mut b = [0u32; 3];
        assert_eq!(ls_shamir_share_seeded(s, 6, 42, a.as_mut_ptr(), 3), LsStatus::Ok);
        assert_eq!(ls_shamir_share_seeded(s, 6, 42, b.as_mut_ptr(), 3), LsStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(ls_shamir_share_seeded(s, 6, 42, a.as_mut_ptr(), 2), LsStatus::BufferTooSmall);

        ls_shamir_free(s);
        assert_eq!(ls_shamir_new(f, 3, 2, [1u32, 1, 2].as_ptr(), &mut s), LsStatus::InvalidParameter);
        ls_field_free(f);
    }
}

#[test]
fn all_ones_style_leakage_over_gf2() {
    let f = field(1);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ls_shamir_new(f, 1, 1, ptr::null(), &mut s), LsStatus::Ok);
        let mut nt = 0;
        assert_eq!(ls_shamir_n_tilde(s, &mut nt), LsStatus::Ok);
        assert_eq!(nt, 1);
        let (mut total, mut bits) = (0.0, [0.0f64; 1]);
        assert_eq!(ls_shamir_exact_mi_bsc(s, 0.1, ptr::null(), 0, &mut total, bits.as_mut_ptr(), 1), LsStatus::Ok);
        let mut h = 0.0;
        ls_binary_entropy(0.1, &mut h);
        assert!((total - (1.0 - h)).abs() < 1e-12);
        assert!((bits[0] - total).abs() < 1e-12);
        assert_eq!(ls_shamir_exact_mi_bsc(s, 0.1, [1.0].as_ptr(), 1, &mut total, ptr::null_mut(), 0), LsStatus::InvalidParameter);
        ls_shamir_free(s);
        ls_field_free(f);
    }
}

#[test]
fn bounds() {
    let (mut d, mut b, mut hinv) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(ls_delta_from_eps(0.5, &mut d), LsStatus::Ok);
        assert_eq!(ls_binary_entropy_inv(0.5, &mut hinv), LsStatus::Ok);
        assert!((d - (1.0 - 2.0 * hinv)).abs() < 1e-12);
        assert_eq!(ls_bound_bitwise(4, 0, 0.5, &mut b), LsStatus::Ok);
        assert!((b - d.powi(8)).abs() < 1e-12);
        assert_eq!(ls_bound_bitwise(1, 2, 0.5, &mut b), LsStatus::InvalidParameter);
    }
}

#[test]
fn analyze_json() {
    let cfg = CString::new("eps = 0.5\n[scheme]\nkind = \"all_ones\"\nn = 4\n[scheme.field]\nl = 1\n").unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(ls_analyze_toml(cfg.as_ptr(), &mut json), LsStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        ls_string_free(json);
        assert_eq!(v["n_tilde"], 4);
        let mut d = 0.0;
        ls_delta_from_eps(0.5, &mut d);
        assert!((v["per_bit_bound"].as_f64().unwrap() - d.powi(8)).abs() < 1e-12);

        let bad = CString::new("[scheme]\nkind = \"nope\"\n").unwrap();
        assert_eq!(ls_analyze_toml(bad.as_ptr(), &mut json), LsStatus::Config);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ls_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
