use dqs_ffi::*;
use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

#[test]
fn search_round_trip() {
    let mut r = DqsSearchResult::default();
    assert_eq!(unsafe { dqs_run_search(4, 13, &mut r) }, DqsStatus::Ok);
    assert_eq!(r.measured, 13);
    assert_eq!((r.u0_calls, r.d2_calls), (4, 4));
    assert!((r.probability - 1.0).abs() < 1e-9);
}

#[test]
fn circuit_handles() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(dqs_search_circuit(2, 1, &mut c), DqsStatus::Ok);
        let mut count = 0u64;
        assert_eq!(dqs_circuit_gate_count(c, &mut count), DqsStatus::Ok);
        assert_eq!(count, 2);
        assert_eq!(dqs_circuit_two_qubit_count(c, &mut count), DqsStatus::Ok);
        assert_eq!(count, 2);

        let mut text = ptr::null_mut();
        assert_eq!(dqs_circuit_dump(c, &mut text), DqsStatus::Ok);
        assert_eq!(
            CStr::from_ptr(text).to_str().unwrap(),
            "QUBITS 2\nANCILLAS 0\nTARGET 1\nORACLE 0\nD2 0 1\n"
        );
        dqs_string_free(text);

        let mut s = ptr::null_mut();
        assert_eq!(dqs_state_uniform(2, &mut s), DqsStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(dqs_circuit_simulate(c, s, &mut out), DqsStatus::Ok);
        let mut p = 0.0;
        assert_eq!(dqs_state_probability(out, 1, &mut p), DqsStatus::Ok);
        assert!((p - 1.0).abs() < 1e-12);
        let mut q = 0u32;
        assert_eq!(dqs_state_num_qubits(out, &mut q), DqsStatus::Ok);
        assert_eq!(q, 2);

        dqs_state_free(out);
        dqs_state_free(s);
        dqs_circuit_free(c);
        dqs_circuit_free(ptr::null_mut());
    }
}

#[test]
fn partial_and_grover_handles() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(dqs_partial_circuit(6, 45, 2, &mut c), DqsStatus::Ok);
        dqs_circuit_free(c);
        assert_eq!(dqs_grover_circuit(4, 5, 2, &mut c), DqsStatus::Ok);
        let mut s = ptr::null_mut();
        dqs_state_uniform(4, &mut s);
        let mut out = ptr::null_mut();
        assert_eq!(dqs_circuit_simulate(c, s, &mut out), DqsStatus::Ok);
        let mut p = 0.0;
        dqs_state_probability(out, 5, &mut p);
        assert!((p - 3721.0 / 4096.0).abs() < 1e-9);
        dqs_state_free(out);
        dqs_state_free(s);
        dqs_circuit_free(c);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(dqs_search_circuit(5, 1, &mut c), DqsStatus::InvalidArgument);
        assert!(c.is_null());
        assert!(last_error().unwrap().contains("partial --odd"));
        assert_eq!(
            dqs_search_circuit(4, 1, ptr::null_mut()),
            DqsStatus::NullPointer
        );
        assert_eq!(
            dqs_circuit_gate_count(ptr::null(), &mut 0),
            DqsStatus::NullPointer
        );
        assert_eq!(
            dqs_recursive_diffusion_cost(3, &mut 0),
            DqsStatus::InvalidArgument
        );

        // width mismatch surfaces as a simulation failure
        dqs_search_circuit(4, 1, &mut c);
        let mut s = ptr::null_mut();
        dqs_state_uniform(2, &mut s);
        let mut out = ptr::null_mut();
        assert_eq!(
            dqs_circuit_simulate(c, s, &mut out),
            DqsStatus::SimulationFailed
        );
        assert!(out.is_null());
        dqs_state_free(s);
        dqs_circuit_free(c);
    }
}

#[test]
fn cost_functions() {
    unsafe {
        let mut v = 0u64;
        assert_eq!(dqs_recursive_diffusion_cost(18, &mut v), DqsStatus::Ok);
        assert_eq!(v, 9841);
        let mut plan = DqsGroverPlan::default();
        assert_eq!(dqs_grover_plan(10, &mut plan), DqsStatus::Ok);
        assert_eq!(plan.iterations, 24);
        let mut x = DqsCrossover::default();
        assert_eq!(
            dqs_crossover(DqsStrategy::AncillaChain, 1, &mut x),
            DqsStatus::Ok
        );
        assert_eq!(
            (x.found, x.n, x.recursive_cost, x.grover_cost),
            (1, 28, 2_391_484, 2_084_454)
        );
        assert_eq!(
            dqs_crossover(DqsStrategy::ZeroAncilla, 1000, &mut x),
            DqsStatus::Ok
        );
        assert_eq!(x.found, 0);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_is_current_and_compiles() {
    let header = crate_dir().join("include/dqs.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in [
        "dqs_run_search",
        "dqs_circuit_free",
        "DQS_STATUS_NULL_POINTER",
        "typedef struct DqsCircuit DqsCircuit",
    ] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let status = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
        .expect("C compiler available");
    assert!(status.success());
}

fn staticlib() -> Option<PathBuf> {
    // test binaries live in target/<profile>/deps next to the library artifacts
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    [
        deps.join("libdqs_ffi.a"),
        deps.parent()?.join("libdqs_ffi.a"),
    ]
    .into_iter()
    .find(|p| p.exists())
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = staticlib() else {
        panic!("libdqs_ffi.a not found near the test binary");
    };
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "dqs.h"
int main(void) {
    DqsSearchResult r;
    if (dqs_run_search(6, 45, &r) != DQS_STATUS_OK) return 1;
    DqsCircuit *c = NULL;
    if (dqs_search_circuit(5, 1, &c) != DQS_STATUS_INVALID_ARGUMENT) return 2;
    if (dqs_last_error_message() == NULL) return 3;
    printf("%llu %.6f\n", (unsigned long long)r.measured, r.probability);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "45 1.000000\n");
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dqs-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    assert!(Path::new(&dir).is_dir());
    dir
}
