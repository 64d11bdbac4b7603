use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cps_windows::arith::{OrbitNumber, Rotation};
use cps_windows::cantor::{CantorApprox, ConstructionPlan};
use cps_windows::complexity::patch_complexity;
use cps_windows::independence::build_independence_set;
use cps_windows::window::{Genericity, WindowSpec};
use cps_windows_ffi::*;

const SILVER: CpswRotation = CpswRotation { d: 2, p: -1, q: 1, r: 1 };
const TENTH: CpswRational = CpswRational { num: 1, den: 10 };

fn build(kind: CpswWindowKind) -> *mut CpswWindow {
    let mut w = ptr::null_mut();
    let st = unsafe { cpsw_window_build(kind, SILVER, TENTH, 3, 7, false, &mut w) };
    assert_eq!(st, CpswStatus::Ok);
    assert!(!w.is_null());
    w
}

fn last_error() -> String {
    let p = cpsw_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { cpsw_string_free(p) };
    s
}

#[test]
fn window_w_matches_the_library() {
    let w = build(CpswWindowKind::W);
    let c = CantorApprox::build(&ConstructionPlan::new(Rotation::silver(), OrbitNumber::rational(1, 10), 3).unwrap())
        .unwrap();
    let here = WindowSpec::w(&c, Genericity::Separated);

    let mut m = 0.0;
    let mut nb = 0usize;
    unsafe {
        assert_eq!(cpsw_window_measure(w, &mut m), CpswStatus::Ok);
        assert_eq!(cpsw_window_boundary_count(w, &mut nb), CpswStatus::Ok);
    }
    assert_eq!(m, here.rotation.to_f64(&here.set.measure()));
    assert_eq!(nb, here.boundary().len());

    let mut p = vec![0u64; 32];
    assert_eq!(unsafe { cpsw_complexity(w, p.len(), p.as_mut_ptr()) }, CpswStatus::Ok);
    assert_eq!(p, patch_complexity(&here, 32).unwrap().p);
    unsafe { cpsw_window_free(w) };
}

#[test]
fn interval_window_codes_and_counts() {
    let rot = Rotation::silver();
    let mut w = ptr::null_mut();
    let lo = CpswRational { num: 0, den: 1 };
    let hi = CpswRational { num: 2, den: 5 };
    assert_eq!(unsafe { cpsw_window_interval(SILVER, lo, hi, &mut w) }, CpswStatus::Ok);
    let mut bits = vec![9u8; 50];
    let t = CpswRational { num: 0, den: 1 };
    assert_eq!(unsafe { cpsw_coding_word(w, t, 0, 49, bits.as_mut_ptr()) }, CpswStatus::Ok);
    for (k, b) in bits.iter().enumerate() {
        let y = rot.frac(&OrbitNumber::new(0, k as i128));
        let inside = rot.le(&y, &OrbitNumber::rational(2, 5));
        assert_eq!(*b, inside as u8, "k = {k}");
    }
    // one arc whose length is not in ℤ + ℤω: p(n) = 2n once n is large
    let mut p = vec![0u64; 12];
    assert_eq!(unsafe { cpsw_complexity(w, 12, p.as_mut_ptr()) }, CpswStatus::Ok);
    let here = WindowSpec::interval(rot, OrbitNumber::ZERO, OrbitNumber::rational(2, 5), false, false).unwrap();
    assert_eq!(p, patch_complexity(&here, 12).unwrap().p);
    assert!(p[3..].iter().zip(4u64..).all(|(&v, n)| v == 2 * n), "{p:?}");
    unsafe { cpsw_window_free(w) };
}

#[test]
fn json_round_trip() {
    let w = build(CpswWindowKind::Random);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cpsw_window_to_json(w, &mut s) }, CpswStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { cpsw_window_from_json(s, &mut back) }, CpswStatus::Ok);
    let (mut a, mut b) = (vec![0u64; 16], vec![0u64; 16]);
    unsafe {
        cpsw_complexity(w, 16, a.as_mut_ptr());
        cpsw_complexity(back, 16, b.as_mut_ptr());
        cpsw_string_free(s);
        cpsw_window_free(w);
        cpsw_window_free(back);
    }
    assert_eq!(a, b);
}

#[test]
fn errors_map_to_codes() {
    let mut w = ptr::null_mut();
    let square = CpswRotation { d: 4, p: 0, q: 1, r: 3 };
    assert_eq!(
        unsafe { cpsw_window_build(CpswWindowKind::W, square, TENTH, 3, 0, false, &mut w) },
        CpswStatus::RationalRotation
    );
    assert!(w.is_null());
    assert!(!last_error().is_empty());

    let zero = CpswRational { num: 1, den: 0 };
    assert_eq!(
        unsafe { cpsw_window_build(CpswWindowKind::W, SILVER, zero, 3, 0, false, &mut w) },
        CpswStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { cpsw_window_build(CpswWindowKind::V, SILVER, TENTH, 3, 0, false, ptr::null_mut()) },
        CpswStatus::NullPointer
    );
    assert!(last_error().contains("out"));

    let w = build(CpswWindowKind::V);
    let mut p = [0u64; 1];
    assert_eq!(unsafe { cpsw_complexity(w, 0, p.as_mut_ptr()) }, CpswStatus::InvalidArgument);
    assert_eq!(unsafe { cpsw_complexity(ptr::null(), 1, p.as_mut_ptr()) }, CpswStatus::NullPointer);
    let bad = CString::new("{not json").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cpsw_window_from_json(bad.as_ptr(), &mut out) }, CpswStatus::Parse);
    unsafe {
        cpsw_window_free(w);
        cpsw_window_free(ptr::null_mut());
        cpsw_string_free(ptr::null_mut());
    }
}

#[test]
fn certificates_are_checked() {
    let rot = Rotation::silver();
    let w = WindowSpec::interval(rot, OrbitNumber::rational(1, 10), OrbitNumber::rational(1, 2), false, false).unwrap();
    let v0 = WindowSpec::custom(w.set.complement());
    let cert = build_independence_set(&v0, &w, 2).unwrap();
    let json = CString::new(cert.to_json().unwrap()).unwrap();
    let mut ok = false;
    assert_eq!(unsafe { cpsw_verify_certificate(json.as_ptr(), &mut ok) }, CpswStatus::Ok);
    assert!(ok);
    let junk = CString::new("[]").unwrap();
    assert_eq!(unsafe { cpsw_verify_certificate(junk.as_ptr(), &mut ok) }, CpswStatus::Parse);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(cpsw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "cps_windows.h"
int main(void) {
    CpswRotation silver = {2, -1, 1, 1};
    CpswRational lo = {0, 1}, hi = {2, 5};
    CpswWindow *w = NULL;
    if (cpsw_window_interval(silver, lo, hi, &w) != CPSW_STATUS_OK) return 1;
    uint64_t p[8];
    if (cpsw_complexity(w, 8, p) != CPSW_STATUS_OK) return 2;
    cpsw_window_free(w);
    if (p[0] != 2 || p[7] != 16) return 3;
    CpswRotation rational = {4, 0, 1, 3};
    if (cpsw_window_interval(rational, lo, hi, &w) != CPSW_STATUS_RATIONAL_ROTATION) return 4;
    char *msg = cpsw_last_error();
    if (msg == NULL) return 5;
    cpsw_string_free(msg);
    printf("ok\n");
    return 0;
}
"#;

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header())
        .arg(&src)
        .output()
        .expect("a C compiler on PATH");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// Links the C program against the static library cargo built next to
/// this test binary.
#[test]
fn c_program_links_against_staticlib() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libcps_windows_ffi.a");
    assert!(lib.exists(), "staticlib not built at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-I"])
        .arg(header())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n", "exit {:?}", run.status.code());
}
