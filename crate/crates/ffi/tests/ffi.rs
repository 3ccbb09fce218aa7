use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use torus_hms_ffi::*;

const SQUARE: &str = r#"{"d":1,"I":[["0","-1"],["1","0"]],"G":[["1","0"],["0","1"]],"B":[["0","0"],["0","0"]],"label":"square"}"#;
const STRETCHED: &str = r#"{"d":1,"I":[["0","-1/2"],["2","0"]],"G":[["4","0"],["0","1"]],"B":[["0","0"],["0","0"]]}"#;
const T4: &str = r#"{"d":2,
  "I":[["0","1","0","0"],["-1","0","0","0"],["0","0","0","1"],["0","0","-1","0"]],
  "G":[["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]],
  "B":[["0","0","0","0"],["0","0","0","0"],["0","0","0","0"],["0","0","0","0"]]}"#;

fn torus(json: &str) -> *mut FhmsTorus {
    let c = CString::new(json).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fhms_torus_from_json(c.as_ptr(), &mut t) }, FhmsStatus::Ok);
    assert!(!t.is_null());
    t
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { fhms_string_free(s) };
    out
}

fn last_error() -> Option<String> {
    let p = fhms_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn torus_round_trip_and_dim() {
    let t = torus(SQUARE);
    assert_eq!(unsafe { fhms_torus_dim(t) }, 1);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fhms_torus_to_json(t, &mut out) }, FhmsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["label"], "square");
    unsafe { fhms_torus_free(t) };
    assert_eq!(unsafe { fhms_torus_dim(ptr::null()) }, 0);
}

#[test]
fn self_mirror_search_and_refutation() {
    let (a, b) = (torus(SQUARE), torus(STRETCHED));
    let mut out = ptr::null_mut();
    let s = unsafe { fhms_search_relation(a, a, FhmsRelation::Mirror, 2, 1_000_000, &mut out) };
    assert_eq!(s, FhmsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["status"], "found");
    assert_eq!(v["certificate"]["valid"], true);

    let s = unsafe { fhms_search_relation(a, b, FhmsRelation::Iso, 3, 1_000_000, &mut out) };
    assert_eq!(s, FhmsStatus::Refuted);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["status"], "none_within_bound");

    let s = unsafe { fhms_search_relation(a, b, FhmsRelation::DerivedEq, 3, 10, &mut out) };
    assert_eq!(s, FhmsStatus::BudgetExceeded);
    assert!(last_error().unwrap().contains("budget"));
    unsafe {
        fhms_torus_free(a);
        fhms_torus_free(b);
    }
}

#[test]
fn mirror_hodge_lefschetz() {
    let t = torus(T4);
    let split = CString::new("1,0,0,0;0,0,1,0|0,1,0,0;0,0,0,1").unwrap();
    let (mut m, mut cert) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { fhms_mirror(t, split.as_ptr(), &mut m, &mut cert) }, FhmsStatus::Ok);
    let c: serde_json::Value = serde_json::from_str(&take(cert)).unwrap();
    assert_eq!(c["kind"], "mirror");
    assert_eq!(c["valid"], true);
    assert_eq!(unsafe { fhms_torus_dim(m) }, 2);

    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fhms_hodge(m, &mut h) }, FhmsStatus::Ok);
    let h: serde_json::Value = serde_json::from_str(&take(h)).unwrap();
    assert_eq!(h["h"][1][1], 4);

    let mut k = 0usize;
    assert_eq!(unsafe { fhms_lefschetz_kernel_dim(t, &mut k) }, FhmsStatus::Ok);
    assert_eq!(k, 5);

    let bad = CString::new("1,0,0,0;0,1,0,0|0,0,1,0;0,0,0,1").unwrap();
    let s = unsafe { fhms_mirror(t, bad.as_ptr(), &mut m, &mut cert) };
    assert_ne!(s, FhmsStatus::Ok);
    assert!(last_error().is_some());
    unsafe {
        fhms_torus_free(m);
        fhms_torus_free(t);
    }
}

#[test]
fn abrane_check_statuses() {
    let t = torus(T4);
    let good = CString::new(
        r#"{"torus_ref":"","Y_basis":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"translation":["0","0","0","0"],"F":[[0,0,1,0],[0,0,0,-1],[-1,0,0,0],[0,1,0,0]]}"#,
    )
    .unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fhms_abrane_check(t, good.as_ptr(), &mut out) }, FhmsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["k"], 1);

    let bad = CString::new(
        r#"{"Y_basis":[[1,0,0,0],[0,1,0,0],[0,0,1,0]],"translation":["0","0","0","0"],"F":[[0,0,0],[0,0,0],[0,0,0]]}"#,
    )
    .unwrap();
    assert_eq!(unsafe { fhms_abrane_check(t, bad.as_ptr(), &mut out) }, FhmsStatus::Refuted);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["rejection"]["condition"], "dimension_law");
    unsafe { fhms_torus_free(t) };
}

#[test]
fn errors_are_reported() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fhms_torus_from_json(ptr::null(), &mut t) }, FhmsStatus::NullPointer);
    let junk = CString::new("{\"d\": 1}").unwrap();
    assert_eq!(unsafe { fhms_torus_from_json(junk.as_ptr(), &mut t) }, FhmsStatus::Parse);
    assert!(last_error().unwrap().contains("missing field"));
    let invalid = CString::new(SQUARE.replace("[\"1\",\"0\"],[\"0\",\"1\"]", "[\"2\",\"0\"],[\"0\",\"1\"]")).unwrap();
    assert_eq!(unsafe { fhms_torus_from_json(invalid.as_ptr(), &mut t) }, FhmsStatus::InvalidTorus);
    let ok = CString::new(SQUARE).unwrap();
    assert_eq!(unsafe { fhms_torus_from_json(ok.as_ptr(), ptr::null_mut()) }, FhmsStatus::NullPointer);
    let mut k = 0usize;
    assert_eq!(unsafe { fhms_lefschetz_kernel_dim(ptr::null(), &mut k) }, FhmsStatus::NullPointer);
    // A successful call clears the message.
    let sq = torus(SQUARE);
    assert!(last_error().is_none());
    unsafe { fhms_torus_free(sq) };
}

#[test]
fn cli_entry_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(&path, SQUARE).unwrap();
    let args: Vec<CString> = ["torus-hms", "validate", path.to_str().unwrap()]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let (mut out, mut code) = (ptr::null_mut(), -1);
    assert_eq!(unsafe { fhms_cli_run(argv.as_ptr(), argv.len(), &mut out, &mut code) }, FhmsStatus::Ok);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["command"], "validate");
    assert_eq!(v["result"]["ok"], true);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("torus_hms.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for name in ["fhms_torus_from_json", "fhms_string_free", "fhms_last_error", "FHMS_STATUS_REFUTED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ FhmsTorus *t = 0; return fhms_torus_from_json(\"{{}}\", &t) == FHMS_STATUS_OK; }}\n",
            header.display()
        ),
    )
    .unwrap();
    match Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg(&src).status() {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler available; syntax check skipped"),
    }
}
