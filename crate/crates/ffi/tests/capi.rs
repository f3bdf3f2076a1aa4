use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use auctionlab_ffi::*;

// two keywords, two bidders; k0 can be sold to a at price 3
const DOC: &str = r#"{
  "keywords": ["k0", "k1"],
  "bidders": [{"id": "a", "budget": 6}, {"id": "b", "budget": 5}],
  "bids": [
    {"keyword": "k0", "bidder": "a", "amount": 4},
    {"keyword": "k0", "bidder": "b", "amount": 3},
    {"keyword": "k1", "bidder": "a", "amount": 5},
    {"keyword": "k1", "bidder": "b", "amount": 5}
  ]
}"#;

fn load() -> *mut AlInstance {
    let json = CString::new(DOC).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { al_instance_from_json(json.as_ptr(), &mut inst) }, AlStatus::Ok);
    inst
}

fn last_error() -> Option<String> {
    let p = al_last_error_message();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { al_string_free(p) };
    Some(s)
}

#[test]
fn execute_and_inspect() {
    let inst = load();
    unsafe {
        assert_eq!(al_instance_num_keywords(inst), 2);
        assert_eq!(al_instance_num_bidders(inst), 2);
        let first = [0i64, -1];
        let second = [1i64, -1];
        let mut trace = ptr::null_mut();
        assert_eq!(
            al_execute(inst, first.as_ptr(), second.as_ptr(), 2, &mut trace),
            AlStatus::Ok
        );
        assert_eq!(al_trace_value(trace), 3);
        assert_eq!(al_trace_len(trace), 2);
        let (mut f, mut s, mut p) = (0i64, 0i64, 0u64);
        assert_eq!(al_trace_step(trace, 0, &mut f, &mut s, &mut p), AlStatus::Ok);
        assert_eq!((f, s, p), (0, 1, 3));
        assert_eq!(al_trace_step(trace, 1, &mut f, &mut s, &mut p), AlStatus::Ok);
        assert_eq!((f, s, p), (-1, -1, 0));
        assert_eq!(al_trace_step(trace, 2, &mut f, &mut s, &mut p), AlStatus::OutOfRange);
        assert!(last_error().is_some());

        let mut json = ptr::null_mut();
        assert_eq!(al_trace_to_json(trace, &mut json), AlStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        al_string_free(json);
        assert!(text.contains("\"k0\""));
        al_trace_free(trace);
        al_instance_free(inst);
    }
}

#[test]
fn illegal_action_reports_error() {
    let inst = load();
    unsafe {
        // b cannot win k0 over a: eff(b)=3 < eff(a)=4
        let first = [1i64, -1];
        let second = [0i64, -1];
        let mut trace = ptr::null_mut();
        assert_eq!(
            al_execute(inst, first.as_ptr(), second.as_ptr(), 2, &mut trace),
            AlStatus::IllegalAction
        );
        assert!(trace.is_null());
        assert!(last_error().is_some());
        // a following success clears the message
        assert_eq!(al_instance_num_keywords(inst), 2);
        let mut n = 0usize;
        assert_eq!(al_max_matching_size(inst, &mut n), AlStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!(last_error(), None);
        al_instance_free(inst);
    }
}

#[test]
fn bad_input() {
    let mut inst = ptr::null_mut();
    let bad = CString::new("{\"keywords\": 3}").unwrap();
    unsafe {
        assert_eq!(
            al_instance_from_json(bad.as_ptr(), &mut inst),
            AlStatus::InvalidInstance
        );
        assert_eq!(al_instance_from_json(ptr::null(), &mut inst), AlStatus::NullPointer);
        assert_eq!(al_trace_value(ptr::null()), 0);
        al_instance_free(ptr::null_mut());
        al_trace_free(ptr::null_mut());
        al_string_free(ptr::null_mut());
    }
}

#[test]
fn solvers_agree_with_oracle() {
    let inst = load();
    unsafe {
        let mut opt = ptr::null_mut();
        assert_eq!(al_opt_2paa(inst, 0, &mut opt), AlStatus::Ok);
        let best = al_trace_value(opt);
        al_trace_free(opt);
        assert_eq!(best, 6);

        let mut t = ptr::null_mut();
        assert_eq!(al_solve_top_c(inst, 1, &mut t), AlStatus::Ok);
        assert!(al_trace_value(t) <= best);
        al_trace_free(t);
        assert_eq!(al_solve_top_c(inst, 0, &mut t), AlStatus::InvalidArgument);

        assert_eq!(al_solve_greedy(inst, &mut t), AlStatus::Ok);
        assert!(al_trace_value(t) <= best);
        al_trace_free(t);

        assert_eq!(al_solve_ranking_simulate(inst, 7, &mut t), AlStatus::Ok);
        assert!(al_trace_value(t) <= best);
        al_trace_free(t);

        let mut size = 0usize;
        assert_eq!(al_ranking_matching_size(inst, 7, &mut size), AlStatus::Ok);
        assert!(size <= 2);
        al_instance_free(inst);
    }
}

#[test]
fn zero_one_paths() {
    let doc = r#"{"keywords":["u"],"bidders":[{"id":"x","budget":1},{"id":"y","budget":1}],
        "bids":[{"keyword":"u","bidder":"x","amount":1},{"keyword":"u","bidder":"y","amount":1}]}"#;
    let json = CString::new(doc).unwrap();
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(al_instance_from_json(json.as_ptr(), &mut inst), AlStatus::Ok);
        let mut t = ptr::null_mut();
        assert_eq!(al_opt_2pm(inst, 0, &mut t), AlStatus::Ok);
        assert_eq!(al_trace_value(t), 1);
        al_trace_free(t);
        assert_eq!(al_solve_reverse_match(inst, &mut t), AlStatus::Ok);
        assert_eq!(al_trace_value(t), 1);
        al_trace_free(t);
        let mut out = ptr::null_mut();
        assert_eq!(al_instance_to_json(inst, &mut out), AlStatus::Ok);
        al_string_free(out);
        al_instance_free(inst);
    }
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let lib = target_dir();
    if !lib.join("libauctionlab_ffi.a").exists() {
        eprintln!("staticlib not built, skipping");
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "auctionlab.h"

int main(void) {
    const char *doc = "{\"keywords\":[\"k\"],\"bidders\":[{\"id\":\"a\",\"budget\":6},{\"id\":\"b\",\"budget\":3}],"
                      "\"bids\":[{\"keyword\":\"k\",\"bidder\":\"a\",\"amount\":6},{\"keyword\":\"k\",\"bidder\":\"b\",\"amount\":3}]}";
    AlInstance *inst = NULL;
    if (al_instance_from_json(doc, &inst) != AL_STATUS_OK) return 10;
    int64_t first[1] = {0}, second[1] = {1};
    AlTrace *trace = NULL;
    if (al_execute(inst, first, second, 1, &trace) != AL_STATUS_OK) return 11;
    if (al_trace_value(trace) != 3) return 12;
    al_trace_free(trace);
    first[0] = 1; second[0] = 0;
    if (al_execute(inst, first, second, 1, &trace) != AL_STATUS_ILLEGAL_ACTION) return 13;
    char *msg = al_last_error_message();
    if (msg == NULL || strlen(msg) == 0) return 14;
    al_string_free(msg);
    al_instance_free(inst);
    puts("ok");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(lib.join("libauctionlab_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C smoke exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
