//! C ABI for `signflow`.
//!
//! Graphs and flows cross the boundary as opaque handles owned by the caller
//! and released with the matching `*_free`. Every fallible call returns an
//! [`SfStatus`]; on failure a message is kept per thread and can be read with
//! [`sf_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use signflow::circuits::{is_flow_admissible, Method};
use signflow::error::TheoremError;
use signflow::flows::{verify_int_flow, IntFlow};
use signflow::graph::{Edge, EdgeId, Sign, SignedGraph};
use signflow::oracle::{nz_k_flow_search, SearchBudget, SearchOutcome};
use signflow::sgf::{parse_sgf, write_sgf};
use signflow::theorem8::eight_flow;

/// Result codes. The non-zero values shared with the command line keep the
/// same meaning there.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    HypothesisFailed = 2,
    Absent = 3,
    Budget = 4,
    InputError = 5,
    NullPointer = 6,
    InternalError = 10,
    Panic = 11,
}

/// A signed graph.
pub struct SfGraph {
    graph: SignedGraph,
}

/// An integer flow, indexed by edge id.
pub struct SfFlow {
    flow: IntFlow,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: SfStatus, msg: impl Into<String>) -> SfStatus {
    set_error(msg);
    status
}

/// Runs `body`, turning a panic into [`SfStatus::Panic`].
fn guard(body: impl FnOnce() -> SfStatus) -> SfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SfStatus::Panic, msg)
        }
    }
}

macro_rules! deref {
    ($p:expr, $name:literal) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return fail(SfStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

macro_rules! out {
    ($p:expr, $name:literal) => {
        match unsafe { $p.as_mut() } {
            Some(r) => r,
            None => return fail(SfStatus::NullPointer, concat!($name, " is null")),
        }
    };
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A graph with `n` vertices and no edges.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_new(n: usize, out: *mut *mut SfGraph) -> SfStatus {
    guard(|| {
        let out = out!(out, "out");
        match SignedGraph::new(n, []) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(SfGraph { graph }));
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::InputError, e.to_string()),
        }
    })
}

/// Parses SGF text. Parse errors carry the line number in the message.
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_parse_sgf(text: *const c_char, out: *mut *mut SfGraph) -> SfStatus {
    guard(|| {
        if text.is_null() {
            return fail(SfStatus::NullPointer, "text is null");
        }
        let out = out!(out, "out");
        let Ok(text) = unsafe { CStr::from_ptr(text) }.to_str() else {
            return fail(SfStatus::InputError, "text is not UTF-8");
        };
        match parse_sgf(text) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(SfGraph { graph }));
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::InputError, e.to_string()),
        }
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_free(g: *mut SfGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Appends an edge `a b` with the next free id, written to `out_id`.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_add_edge(g: *mut SfGraph, a: usize, b: usize, negative: bool, out_id: *mut usize) -> SfStatus {
    guard(|| {
        let g = out!(g, "graph");
        let id = g.graph.next_edge_id();
        let sign = if negative { Sign::Negative } else { Sign::Positive };
        let edges = g.graph.edges().iter().cloned().chain([Edge::new(id.0, a, b, sign)]);
        match SignedGraph::new(g.graph.vertex_count(), edges) {
            Ok(graph) => {
                g.graph = graph;
                if let Some(o) = unsafe { out_id.as_mut() } {
                    *o = id.0;
                }
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::InputError, e.to_string()),
        }
    })
}

/// Vertex count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_vertex_count(g: *const SfGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.graph.vertex_count())
}

/// Edge count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_edge_count(g: *const SfGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.graph.edge_count())
}

/// The graph as SGF text. Free the result with [`sf_string_free`].
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_to_sgf(g: *const SfGraph, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let g = deref!(g, "graph");
        let out = out!(out, "out");
        match CString::new(write_sgf(&g.graph)) {
            Ok(s) => {
                *out = s.into_raw();
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::InternalError, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_is_balanced(g: *const SfGraph, out: *mut bool) -> SfStatus {
    guard(|| {
        let g = deref!(g, "graph");
        *out!(out, "out") = g.graph.is_balanced();
        SfStatus::Ok
    })
}

/// Every edge lies in a signed circuit.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_is_flow_admissible(g: *const SfGraph, out: *mut bool) -> SfStatus {
    guard(|| {
        let g = deref!(g, "graph");
        let out = out!(out, "out");
        match is_flow_admissible(&g.graph, Method::Deletion) {
            Ok(b) => {
                *out = b;
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::InternalError, e.to_string()),
        }
    })
}

/// A nowhere-zero 8-flow. Fails with [`SfStatus::HypothesisFailed`] when
/// the graph is not flow-admissible or its underlying graph has no
/// nowhere-zero 4-flow.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_eight_flow(g: *const SfGraph, out: *mut *mut SfFlow) -> SfStatus {
    guard(|| {
        let g = deref!(g, "graph");
        let out = out!(out, "out");
        match eight_flow(&g.graph) {
            Ok((flow, _)) => {
                *out = Box::into_raw(Box::new(SfFlow { flow }));
                SfStatus::Ok
            }
            Err(e @ (TheoremError::NotFlowAdmissible | TheoremError::NoFourFlow)) => {
                fail(SfStatus::HypothesisFailed, e.to_string())
            }
            Err(e @ TheoremError::Budget) => fail(SfStatus::Budget, e.to_string()),
            Err(e) => fail(SfStatus::InternalError, e.to_string()),
        }
    })
}

/// Exhaustive search for a nowhere-zero `k`-flow. A `node_limit` of 0 uses
/// the default budget. `*out` is left null unless a flow is found.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sf_oracle_flow(g: *const SfGraph, k: i64, node_limit: u64, out: *mut *mut SfFlow) -> SfStatus {
    guard(|| {
        let g = deref!(g, "graph");
        let out = out!(out, "out");
        *out = ptr::null_mut();
        let budget = if node_limit == 0 { SearchBudget::default() } else { SearchBudget::nodes(node_limit) };
        match nz_k_flow_search(&g.graph, k, None, &budget) {
            Ok(SearchOutcome::Found(flow)) => {
                *out = Box::into_raw(Box::new(SfFlow { flow }));
                SfStatus::Ok
            }
            Ok(SearchOutcome::Absent) => fail(SfStatus::Absent, format!("no nowhere-zero {k}-flow")),
            Ok(SearchOutcome::BudgetExhausted) => fail(SfStatus::Budget, "search budget exhausted"),
            Err(e) => fail(SfStatus::InputError, e.to_string()),
        }
    })
}

/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_flow_free(f: *mut SfFlow) {
    if !f.is_null() {
        drop(unsafe { Box::from_raw(f) });
    }
}

/// Number of edges carrying a value, or 0 for null.
///
/// # Safety
/// `f` must be null or a live flow handle.
#[no_mangle]
pub unsafe extern "C" fn sf_flow_len(f: *const SfFlow) -> usize {
    unsafe { f.as_ref() }.map_or(0, |f| f.flow.len())
}

/// Value on edge `edge` in the canonical frame.
///
/// # Safety
/// `f` must be a live flow handle.
#[no_mangle]
pub unsafe extern "C" fn sf_flow_get(f: *const SfFlow, edge: usize, out: *mut i64) -> SfStatus {
    guard(|| {
        let f = deref!(f, "flow");
        let out = out!(out, "out");
        match f.flow.get(EdgeId(edge)) {
            Some(v) => {
                *out = v;
                SfStatus::Ok
            }
            None => fail(SfStatus::InputError, format!("flow has no value for edge {edge}")),
        }
    })
}

/// Whether `f` is a nowhere-zero `k`-flow on `g`.
///
/// # Safety
/// `g` and `f` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn sf_flow_verify(g: *const SfGraph, f: *const SfFlow, k: i64, out: *mut bool) -> SfStatus {
    guard(|| {
        let g = deref!(g, "graph");
        let f = deref!(f, "flow");
        let out = out!(out, "out");
        match verify_int_flow(&g.graph, &f.flow, k, true) {
            Ok(b) => {
                *out = b;
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::InputError, e.to_string()),
        }
    })
}
