//! Exercises the C ABI from the Rust side: status codes, error reporting,
//! handle lifecycle, and string ownership.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use ustpa_ffi::{
    ustpa_last_error, ustpa_model_counts, ustpa_model_free, ustpa_model_graph_dot,
    ustpa_model_parse, ustpa_model_render, ustpa_model_report_json,
    ustpa_model_report_markdown, ustpa_simulate_trace, ustpa_string_free, ustpa_version,
    UstpaCounts, UstpaModel, UstpaStatus,
};

fn bundled_source() -> CString {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/noa_highway.ustpa"
    ))
    .expect("bundled model is readable");
    CString::new(text).expect("model text has no NUL bytes")
}

fn parse_ok(text: &CString) -> *mut UstpaModel {
    let mut model: *mut UstpaModel = ptr::null_mut();
    let status = unsafe { ustpa_model_parse(text.as_ptr(), &mut model) };
    assert_eq!(status, UstpaStatus::Ok, "parse failed: {}", last_error_text());
    assert!(!model.is_null());
    model
}

fn last_error_text() -> String {
    let ptr = ustpa_last_error();
    if ptr.is_null() {
        return String::new();
    }
    unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned()
}

/// Takes ownership of an FFI string result and frees it.
fn claim_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned();
    unsafe { ustpa_string_free(ptr) };
    text
}

#[test]
fn parse_counts_render_roundtrip() {
    let source = bundled_source();
    let model = parse_ok(&source);

    let mut counts = UstpaCounts {
        losses: 0,
        hazards: 0,
        nodes: 0,
        edges: 0,
        actions: 0,
        ucas: 0,
        scenarios: 0,
        requirements: 0,
    };
    let status = unsafe { ustpa_model_counts(model, &mut counts) };
    assert_eq!(status, UstpaStatus::Ok);
    assert_eq!(
        (counts.losses, counts.hazards, counts.nodes, counts.edges),
        (4, 6, 20, 31)
    );
    assert_eq!(
        (counts.actions, counts.ucas, counts.scenarios, counts.requirements),
        (14, 14, 20, 17)
    );

    let mut text: *mut c_char = ptr::null_mut();
    let status = unsafe { ustpa_model_render(model, &mut text) };
    assert_eq!(status, UstpaStatus::Ok);
    let rendered = claim_string(text);
    assert!(rendered.starts_with("model \"NOA Highway Pilot\""));

    // The rendered text parses back to a model with identical counts.
    let rendered_c = CString::new(rendered).unwrap();
    let again = parse_ok(&rendered_c);
    let mut again_counts = counts;
    let status = unsafe { ustpa_model_counts(again, &mut again_counts) };
    assert_eq!(status, UstpaStatus::Ok);
    assert_eq!(again_counts.ucas, counts.ucas);
    assert_eq!(again_counts.edges, counts.edges);

    unsafe {
        ustpa_model_free(model);
        ustpa_model_free(again);
    }
}

#[test]
fn exports_all_three_report_formats() {
    let source = bundled_source();
    let model = parse_ok(&source);

    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { ustpa_model_report_json(model, &mut out) }, UstpaStatus::Ok);
    let json = claim_string(out);
    assert!(json.starts_with('{'));
    assert!(json.contains("\"input_digest\""));

    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { ustpa_model_report_markdown(model, &mut out) }, UstpaStatus::Ok);
    let markdown = claim_string(out);
    assert!(markdown.starts_with("# Safety Analysis Report: NOA Highway Pilot"));

    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { ustpa_model_graph_dot(model, &mut out) }, UstpaStatus::Ok);
    let dot = claim_string(out);
    assert!(dot.starts_with("digraph \"NOA Highway Pilot\""));
    assert_eq!(dot.matches("subgraph cluster_").count(), 5);

    unsafe { ustpa_model_free(model) };
}

#[test]
fn parse_error_sets_status_and_message() {
    let source = CString::new("model \"x\"\nloss ??? \"oops\"\n").unwrap();
    let mut model: *mut UstpaModel = ptr::null_mut();
    let status = unsafe { ustpa_model_parse(source.as_ptr(), &mut model) };
    assert_eq!(status, UstpaStatus::ParseError);
    assert!(model.is_null(), "handle untouched on failure");
    let message = last_error_text();
    assert!(message.contains("2:6"), "span in message: {message}");
}

#[test]
fn validation_error_sets_status_and_message() {
    let source =
        CString::new("model \"x\"\nloss L1 \"a\"\nhazard H1 \"b\" losses=[L9]\n").unwrap();
    let mut model: *mut UstpaModel = ptr::null_mut();
    let status = unsafe { ustpa_model_parse(source.as_ptr(), &mut model) };
    assert_eq!(status, UstpaStatus::ValidationError);
    assert!(model.is_null());
    assert!(
        last_error_text().contains("references unknown loss `L9`"),
        "message: {}",
        last_error_text()
    );
}

#[test]
fn null_and_non_utf8_arguments_are_invalid() {
    let mut model: *mut UstpaModel = ptr::null_mut();
    let status = unsafe { ustpa_model_parse(ptr::null(), &mut model) };
    assert_eq!(status, UstpaStatus::InvalidArgument);
    assert!(last_error_text().contains("NULL"));

    let mut counts = UstpaCounts {
        losses: 0,
        hazards: 0,
        nodes: 0,
        edges: 0,
        actions: 0,
        ucas: 0,
        scenarios: 0,
        requirements: 0,
    };
    let status = unsafe { ustpa_model_counts(ptr::null(), &mut counts) };
    assert_eq!(status, UstpaStatus::InvalidArgument);

    let garbage = CString::new([0xff_u8, 0xfe, 0xfd].as_slice()).unwrap();
    let status = unsafe { ustpa_model_parse(garbage.as_ptr(), &mut model) };
    assert_eq!(status, UstpaStatus::InvalidArgument);
    assert!(last_error_text().contains("UTF-8"));
}

#[test]
fn simulates_traces_with_default_and_broken_policies() {
    let trace = CString::new("0 trajectory critical\n1 trajectory critical\n").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { ustpa_simulate_trace(trace.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(status, UstpaStatus::Ok);
    let log = claim_string(out);
    assert_eq!(log, "0 takeover_request trajectory->VF\n1 system_deactivation trajectory->VF\n");

    let bad_trace = CString::new("0 ego_motion warp\n").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { ustpa_simulate_trace(bad_trace.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(status, UstpaStatus::ParseError);
    assert!(last_error_text().contains("warp"));

    let bad_policy = CString::new("policy { hold = 0 }\n").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    let status =
        unsafe { ustpa_simulate_trace(trace.as_ptr(), bad_policy.as_ptr(), &mut out) };
    assert_eq!(status, UstpaStatus::ParseError);
}

#[test]
fn version_is_the_crate_version() {
    let version = unsafe { CStr::from_ptr(ustpa_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
