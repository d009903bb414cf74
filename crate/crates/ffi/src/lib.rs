//! C ABI over `dqs`.
//!
//! Every fallible function returns a [`DqsStatus`]; on failure a message is
//! available from [`dqs_last_error_message`] on the same thread. Objects
//! handed out through `out` pointers are owned by the caller and released
//! with the matching `*_free` function.

use dqs::algorithms::{
    deterministic_search_circuit, grover_circuit, grover_plan, partial_search_circuit, run_search,
    IterationRule, SearchSpec,
};
use dqs::circuit::dump::to_dump;
use dqs::circuit::Circuit;
use dqs::costbench::{crossover, recursive_diffusion_cost, CostModel, Crossover};
use dqs::statevector::StateVector;
use dqs::transpiler::{lower_circuit, DecompositionStrategy};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SimulationFailed = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqsStrategy {
    AncillaChain = 0,
    SingleAncilla = 1,
    ZeroAncilla = 2,
}

impl From<DqsStrategy> for DecompositionStrategy {
    fn from(s: DqsStrategy) -> Self {
        match s {
            DqsStrategy::AncillaChain => DecompositionStrategy::AncillaChain,
            DqsStrategy::SingleAncilla => DecompositionStrategy::SingleAncilla,
            DqsStrategy::ZeroAncilla => DecompositionStrategy::ZeroAncilla,
        }
    }
}

/// Opaque circuit handle.
pub struct DqsCircuit(Circuit);

/// Opaque state-vector handle.
pub struct DqsState(StateVector);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DqsSearchResult {
    pub n: u32,
    pub target: u64,
    pub measured: u64,
    pub probability: f64,
    pub u0_calls: u64,
    pub d2_calls: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DqsGroverPlan {
    pub iterations: u64,
    pub theta: f64,
    pub predicted_success: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DqsCrossover {
    /// 1 when a crossover exists below the scan bound.
    pub found: u8,
    pub n: u32,
    pub recursive_cost: u64,
    pub grover_cost: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl ToString) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (DqsStatus, String)>) -> DqsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DqsStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DqsStatus::Panic
        }
    }
}

fn invalid(e: impl ToString) -> (DqsStatus, String) {
    (DqsStatus::InvalidArgument, e.to_string())
}

fn null(name: &str) -> (DqsStatus, String) {
    (DqsStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (DqsStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (DqsStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

fn spec(n: u32, target: u64) -> Result<SearchSpec, (DqsStatus, String)> {
    let x = usize::try_from(target).map_err(invalid)?;
    SearchSpec::new(n as usize, x).map_err(invalid)
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dqs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Full deterministic search circuit for an even `n`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_search_circuit(
    n: u32,
    target: u64,
    out: *mut *mut DqsCircuit,
) -> DqsStatus {
    guard(|| {
        let c = deterministic_search_circuit(&spec(n, target)?).map_err(invalid)?;
        write_out(out, Box::into_raw(Box::new(DqsCircuit(c))), "out")
    })
}

/// Partial search circuit resolving the first `k` (even) bits.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_partial_circuit(
    n: u32,
    target: u64,
    k: u32,
    out: *mut *mut DqsCircuit,
) -> DqsStatus {
    guard(|| {
        let c = partial_search_circuit(&spec(n, target)?, k as usize).map_err(invalid)?;
        write_out(out, Box::into_raw(Box::new(DqsCircuit(c))), "out")
    })
}

/// Grover circuit with `iterations` oracle/diffuser rounds.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_grover_circuit(
    n: u32,
    target: u64,
    iterations: u64,
    out: *mut *mut DqsCircuit,
) -> DqsStatus {
    guard(|| {
        let s = spec(n, target)?;
        let c = grover_circuit(s.n(), s.x(), iterations).map_err(invalid)?;
        write_out(out, Box::into_raw(Box::new(DqsCircuit(c))), "out")
    })
}

/// # Safety
/// `circuit` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqs_circuit_free(circuit: *mut DqsCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Number of gates in the circuit as built.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_circuit_gate_count(
    circuit: *const DqsCircuit,
    out: *mut u64,
) -> DqsStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        write_out(out, c.0.len() as u64, "out")
    })
}

/// Two-qubit gate count after lowering with the clean-ancilla chain.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_circuit_two_qubit_count(
    circuit: *const DqsCircuit,
    out: *mut u64,
) -> DqsStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        let lowered = lower_circuit(&c.0, DecompositionStrategy::AncillaChain).map_err(invalid)?;
        write_out(out, lowered.two_qubit_count().map_err(invalid)?, "out")
    })
}

/// Text dump of the circuit. Release with [`dqs_string_free`].
///
/// # Safety
/// `circuit` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_circuit_dump(
    circuit: *const DqsCircuit,
    out: *mut *mut c_char,
) -> DqsStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        let text = CString::new(to_dump(&c.0)).map_err(invalid)?;
        write_out(out, text.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Uniform superposition over `n` qubits.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_state_uniform(n: u32, out: *mut *mut DqsState) -> DqsStatus {
    guard(|| {
        let s = StateVector::uniform(n as usize).map_err(invalid)?;
        write_out(out, Box::into_raw(Box::new(DqsState(s))), "out")
    })
}

/// # Safety
/// `state` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dqs_state_free(state: *mut DqsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_state_num_qubits(state: *const DqsState, out: *mut u32) -> DqsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write_out(out, s.0.num_qubits() as u32, "out")
    })
}

/// Probability of basis state `index`.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_state_probability(
    state: *const DqsState,
    index: u64,
    out: *mut f64,
) -> DqsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let i = usize::try_from(index).map_err(invalid)?;
        write_out(out, s.0.probability(i).map_err(invalid)?, "out")
    })
}

/// Runs `circuit` on `input` and returns a new state.
///
/// # Safety
/// `circuit` and `input` must be live handles; `out` must be valid for
/// writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dqs_circuit_simulate(
    circuit: *const DqsCircuit,
    input: *const DqsState,
    out: *mut *mut DqsState,
) -> DqsStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        let s = deref(input, "input")?;
        let result =
            c.0.simulate(&s.0)
                .map_err(|e| (DqsStatus::SimulationFailed, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(DqsState(result))), "out")
    })
}

/// Builds and simulates the full search in one call.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_run_search(
    n: u32,
    target: u64,
    out: *mut DqsSearchResult,
) -> DqsStatus {
    guard(|| {
        let s = spec(n, target)?;
        let o = run_search(&s).map_err(invalid)?;
        let result = DqsSearchResult {
            n,
            target,
            measured: o.measured as u64,
            probability: o.probability,
            u0_calls: o.tally.u0_calls,
            d2_calls: o.tally.d2_calls,
        };
        write_out(out, result, "out")
    })
}

/// Floor-rule Grover iteration plan for `n` qubits.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_grover_plan(n: u32, out: *mut DqsGroverPlan) -> DqsStatus {
    guard(|| {
        let p = grover_plan(n as usize, 0, IterationRule::Floor).map_err(invalid)?;
        write_out(
            out,
            DqsGroverPlan {
                iterations: p.iterations,
                theta: p.theta,
                predicted_success: p.predicted_success,
            },
            "out",
        )
    })
}

/// Recursive D2 count `(3^(n/2) - 1) / 2` for even `n`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_recursive_diffusion_cost(n: u32, out: *mut u64) -> DqsStatus {
    guard(|| {
        write_out(
            out,
            recursive_diffusion_cost(n as usize).map_err(invalid)?,
            "out",
        )
    })
}

/// Even-width crossover of the recursive and Grover diffusion costs.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dqs_crossover(
    strategy: DqsStrategy,
    k: u64,
    out: *mut DqsCrossover,
) -> DqsStatus {
    guard(|| {
        let model = CostModel::new(strategy.into()).with_k(k);
        let result = match crossover(&model, IterationRule::Floor) {
            Crossover::Found {
                n,
                recursive,
                grover,
            } => DqsCrossover {
                found: 1,
                n: n as u32,
                recursive_cost: recursive,
                grover_cost: grover,
            },
            Crossover::NotFound { bound } => DqsCrossover {
                found: 0,
                n: bound as u32,
                ..Default::default()
            },
        };
        write_out(out, result, "out")
    })
}

/// Reads the thread's last error as an owned string (Rust-side helper).
pub fn last_error() -> Option<String> {
    let p = dqs_last_error_message();
    if p.is_null() {
        None
    } else {
        // SAFETY: pointer comes from the thread-local CString just read
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
