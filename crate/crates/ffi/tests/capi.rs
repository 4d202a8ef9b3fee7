use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use signflow_ffi::*;

fn parse(text: &str) -> *mut SfGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sf_graph_parse_sgf(c.as_ptr(), &mut g) }, SfStatus::Ok);
    g
}

fn last_error() -> String {
    let p = sf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

const K4: &str = "v 4\ne 0 1 -\ne 0 2 +\ne 0 3 +\ne 1 2 +\ne 1 3 +\ne 2 3 -\n";

const PETERSEN: &str = "v 10\ne 0 1 +\ne 1 2 +\ne 2 3 +\ne 3 4 +\ne 4 0 +\ne 0 5 +\ne 1 6 +\ne 2 7 +\n\
e 3 8 +\ne 4 9 +\ne 5 7 +\ne 7 9 +\ne 9 6 +\ne 6 8 +\ne 8 5 +\n";

#[test]
fn eight_flow_on_signed_k4() {
    let g = parse(K4);
    unsafe {
        assert_eq!(sf_graph_vertex_count(g), 4);
        assert_eq!(sf_graph_edge_count(g), 6);
        let mut adm = false;
        assert_eq!(sf_graph_is_flow_admissible(g, &mut adm), SfStatus::Ok);
        assert!(adm);
        let mut f = ptr::null_mut();
        assert_eq!(sf_eight_flow(g, &mut f), SfStatus::Ok);
        assert_eq!(sf_flow_len(f), 6);
        let mut ok = false;
        assert_eq!(sf_flow_verify(g, f, 8, &mut ok), SfStatus::Ok);
        assert!(ok);
        for e in 0..6 {
            let mut v = 0;
            assert_eq!(sf_flow_get(f, e, &mut v), SfStatus::Ok);
            assert!(v != 0 && v.abs() < 8);
        }
        sf_flow_free(f);
        sf_graph_free(g);
    }
}

#[test]
fn petersen_fails_the_hypothesis() {
    let g = parse(PETERSEN);
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { sf_eight_flow(g, &mut f) }, SfStatus::HypothesisFailed);
    assert!(last_error().contains("4-flow"));
    unsafe { sf_graph_free(g) };
}

#[test]
fn builder_matches_parser() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sf_graph_new(3, &mut g) }, SfStatus::Ok);
    let mut id = usize::MAX;
    unsafe {
        for (a, b, neg) in [(0, 1, true), (1, 2, false), (2, 0, false)] {
            assert_eq!(sf_graph_add_edge(g, a, b, neg, &mut id), SfStatus::Ok);
        }
        assert_eq!(id, 2);
        assert_eq!(sf_graph_add_edge(g, 0, 7, false, ptr::null_mut()), SfStatus::InputError);
        assert_eq!(sf_graph_edge_count(g), 3);
        let mut text = ptr::null_mut();
        assert_eq!(sf_graph_to_sgf(g, &mut text), SfStatus::Ok);
        let sgf = CStr::from_ptr(text).to_str().unwrap().to_owned();
        sf_string_free(text);
        assert_eq!(sgf, "v 3\ne 0 1 -\ne 1 2 +\ne 2 0 +\n");

        // A lone unbalanced circuit is not flow-admissible.
        let mut adm = true;
        assert_eq!(sf_graph_is_flow_admissible(g, &mut adm), SfStatus::Ok);
        assert!(!adm);
        let mut f = ptr::null_mut();
        assert_eq!(sf_eight_flow(g, &mut f), SfStatus::HypothesisFailed);
        assert_eq!(sf_oracle_flow(g, 11, 0, &mut f), SfStatus::Absent);
        assert!(f.is_null());
        sf_graph_free(g);
    }
}

#[test]
fn oracle_flow_and_bad_bound() {
    let g = parse(K4);
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(sf_oracle_flow(g, 2, 0, &mut f), SfStatus::Absent);
        assert_eq!(sf_oracle_flow(g, 3, 0, &mut f), SfStatus::Ok);
        let mut ok = false;
        assert_eq!(sf_flow_verify(g, f, 3, &mut ok), SfStatus::Ok);
        assert!(ok);
        sf_flow_free(f);
        assert_eq!(sf_oracle_flow(g, 1, 0, &mut f), SfStatus::InputError);
        sf_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("v 2\ne 0 1 +\ne 0 9 -\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sf_graph_parse_sgf(bad.as_ptr(), &mut g) }, SfStatus::InputError);
    assert!(last_error().contains("line 3"));
    assert!(g.is_null());

    assert_eq!(unsafe { sf_graph_parse_sgf(ptr::null(), &mut g) }, SfStatus::NullPointer);
    let mut b = false;
    assert_eq!(unsafe { sf_graph_is_balanced(ptr::null(), &mut b) }, SfStatus::NullPointer);
    assert_eq!(unsafe { sf_graph_edge_count(ptr::null()) }, 0);

    // Success clears the message.
    let g = parse(K4);
    assert!(sf_last_error_message().is_null());
    unsafe {
        sf_graph_free(g);
        sf_graph_free(ptr::null_mut());
        sf_flow_free(ptr::null_mut());
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(sf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/signflow.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["sf_eight_flow", "sf_last_error_message", "SF_STATUS_HYPOTHESIS_FAILED", "typedef struct SfGraph SfGraph"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
