use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ellipsis_ffi::*;

const WIFE: &str = "(decl likes (-> e e t)) (decl wife-of (-> e e)) (decl dan e) (decl george e)
(source (likes (prim dan) (wife-of dan)))
(ellipsis P (parallel dan george))
(expect \"and(likes(dan, wife-of(dan)), likes(george, wife-of(dan)))\"
        \"and(likes(dan, wife-of(dan)), likes(george, wife-of(george)))\")";

fn parse(text: &str) -> (EllStatus, *mut EllProblem) {
    let text = CString::new(text).unwrap();
    let name = CString::new("wife.ell").unwrap();
    let mut p = ptr::null_mut();
    let s = unsafe { ell_problem_parse(text.as_ptr(), name.as_ptr(), &mut p) };
    (s, p)
}

fn run(p: *const EllProblem, linking: i32) -> (EllStatus, String) {
    let mut out = ptr::null_mut();
    let s = unsafe { ell_problem_run(p, linking, &mut out) };
    let json = if out.is_null() {
        String::new()
    } else {
        let j = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        unsafe { ell_string_free(out) };
        j
    };
    (s, json)
}

fn last_error() -> Option<String> {
    let e = ell_last_error();
    (!e.is_null()).then(|| unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned())
}

#[test]
fn parse_and_run() {
    let (s, p) = parse(WIFE);
    assert_eq!(s, EllStatus::Ok);
    let (s, json) = run(p, ELL_LINKING_DEFAULT);
    assert_eq!(s, EllStatus::Ok);
    assert!(json.contains("\"status\": \"pass\""), "{json}");
    assert!(json.contains("likes(george, wife-of(george))"));
    assert!(last_error().is_none());
    unsafe { ell_problem_free(p) };
}

#[test]
fn mismatch_still_reports() {
    let (_, p) = parse(&WIFE.replace("wife-of(george)))", "wife-of(dan)))"));
    let (s, json) = run(p, ELL_LINKING_OFF);
    assert_eq!(s, EllStatus::Mismatch);
    assert!(json.contains("\"unexpected\""));
    unsafe { ell_problem_free(p) };
}

#[test]
fn engine_error_sets_message() {
    let (_, p) = parse(&WIFE.replace("(parallel dan george)", "(parallel george dan)"));
    let (s, json) = run(p, ELL_LINKING_ON);
    assert_eq!(s, EllStatus::EngineError);
    assert!(json.contains("engine-error"));
    assert!(last_error().is_some());
    unsafe { ell_problem_free(p) };
}

#[test]
fn parse_error_has_position() {
    let (s, p) = parse("(source (likes dan");
    assert_eq!(s, EllStatus::ParseError);
    assert!(p.is_null());
    assert!(last_error().unwrap().contains("1:"));
}

#[test]
fn bad_arguments_are_rejected() {
    let mut p = ptr::null_mut();
    let s = unsafe { ell_problem_parse(ptr::null(), ptr::null(), &mut p) };
    assert_eq!(s, EllStatus::InvalidArgument);
    let (_, p) = parse(WIFE);
    let (s, json) = run(p, 7);
    assert_eq!(s, EllStatus::InvalidArgument);
    assert!(json.is_empty());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ell_problem_run(ptr::null(), 0, &mut out) }, EllStatus::InvalidArgument);
    unsafe {
        ell_problem_free(p);
        ell_problem_free(ptr::null_mut());
        ell_string_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ell_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let h = std::fs::read_to_string(dir.join("include/ellipsis.h")).unwrap();
    for sym in [
        "ell_problem_parse",
        "ell_problem_free",
        "ell_problem_run",
        "ell_last_error",
        "ell_string_free",
        "ell_version",
        "ELL_STATUS_INVALID_ARGUMENT = 4",
        "typedef struct EllProblem EllProblem",
    ] {
        assert!(h.contains(sym), "{sym}");
    }
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libellipsis_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("smoke.c");
    let exe = tmp.join("smoke");
    std::fs::write(
        &src,
        format!(
            r#"#include <stdio.h>
#include "ellipsis.h"
int main(void) {{
  EllProblem *p = NULL;
  if (ell_problem_parse({text:?}, "wife.ell", &p) != ELL_STATUS_OK) return 10;
  char *json = NULL;
  EllStatus s = ell_problem_run(p, ELL_LINKING_DEFAULT, &json);
  puts(json);
  ell_string_free(json);
  ell_problem_free(p);
  return (int)s;
}}
"#,
            text = WIFE
        ),
    )
    .unwrap();
    let cc = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("cc");
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"status\": \"pass\""));
}
