//! C ABI for the `bpps` solvers.
//!
//! Instances and solutions are opaque handles created and released through
//! this API. Every fallible call returns a [`BppsStatus`]; on failure a
//! message is available from [`bpps_last_error_message`] on the same thread.
//! Strings handed out by the library are released with [`bpps_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bpps::bench::{solve, Algo, SolveOptions, SolveOutcome};
use bpps::bounds::lb_root;
use bpps::generator::{generate_instance, GeneratorParams};
use bpps::io::{parse_instance, serialize_instance, serialize_solution, ProofStatus};
use bpps::Instance;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BppsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Infeasible = 5,
    Solver = 6,
    Panic = 7,
}

pub const BPPS_ALGO_FFD: u32 = 0;
pub const BPPS_ALGO_VNS: u32 = 1;
pub const BPPS_ALGO_FF_APPROX: u32 = 2;
pub const BPPS_ALGO_BP: u32 = 3;
pub const BPPS_ALGO_VNS_BP: u32 = 4;
pub const BPPS_ALGO_ENUM: u32 = 5;

/// Solver limits; obtain defaults from [`bpps_solve_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BppsSolveOptions {
    pub seed: u64,
    /// VNS time limit in seconds.
    pub t_max: f64,
    /// VNS non-improving iteration limit.
    pub c_max: u64,
    /// Branch-and-price time limit in seconds.
    pub t_limit: f64,
    pub warm_columns: bool,
}

impl From<BppsSolveOptions> for SolveOptions {
    fn from(o: BppsSolveOptions) -> Self {
        SolveOptions {
            seed: o.seed,
            t_max: o.t_max,
            c_max: o.c_max,
            t_limit: o.t_limit,
            warm_columns: o.warm_columns,
        }
    }
}

/// Opaque instance handle.
pub struct BppsInstance {
    inner: Instance,
}

/// Opaque solution handle.
pub struct BppsSolution {
    outcome: SolveOutcome,
    /// Bin index of each item.
    assignment: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), (BppsStatus, String)>) -> BppsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BppsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BppsStatus::Panic
        }
    }
}

fn null(what: &str) -> (BppsStatus, String) {
    (BppsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BppsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (BppsStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nul removed")
        .into_raw()
}

fn algo_from_code(code: u32) -> Option<Algo> {
    Some(match code {
        BPPS_ALGO_FFD => Algo::Ffd,
        BPPS_ALGO_VNS => Algo::Vns,
        BPPS_ALGO_FF_APPROX => Algo::FfApprox,
        BPPS_ALGO_BP => Algo::Bp,
        BPPS_ALGO_VNS_BP => Algo::VnsBp,
        BPPS_ALGO_ENUM => Algo::Enum,
        _ => return None,
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn bpps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn bpps_solve_options_default() -> BppsSolveOptions {
    let d = SolveOptions::default();
    BppsSolveOptions {
        seed: d.seed,
        t_max: d.t_max,
        c_max: d.c_max,
        t_limit: d.t_limit,
        warm_columns: d.warm_columns,
    }
}

/// Parses an instance from NUL-terminated text in the instance file format.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_parse(text: *const c_char, out: *mut *mut BppsInstance) -> BppsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(text, "text")?;
        let inner = parse_instance(text).map_err(|e| (BppsStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(BppsInstance { inner }));
        Ok(())
    })
}

/// Generates a random instance with sizes in 1..=99, capacity 100 and
/// scenario membership probability 1/2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_generate(
    n: usize,
    d: usize,
    seed: u64,
    out: *mut *mut BppsInstance,
) -> BppsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = generate_instance(&GeneratorParams::new(n, d, seed))
            .map_err(|e| (BppsStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(BppsInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from this library and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_free(instance: *mut BppsInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Item count, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_num_items(instance: *const BppsInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_items())
}

/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_num_scenarios(instance: *const BppsInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_scenarios())
}

/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_capacity(instance: *const BppsInstance) -> u32 {
    instance.as_ref().map_or(0, |i| i.inner.capacity())
}

/// Writes the instance in file format; free the string with
/// [`bpps_string_free`].
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bpps_instance_to_text(instance: *const BppsInstance, out: *mut *mut c_char) -> BppsStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(serialize_instance(&inst.inner));
        Ok(())
    })
}

/// Best of the continuous and dual-feasible-function lower bounds.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bpps_lower_bound(instance: *const BppsInstance, out: *mut usize) -> BppsStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lb_root(&inst.inner);
        Ok(())
    })
}

/// Runs one of the `BPPS_ALGO_*` algorithms. `options` may be null for
/// defaults.
///
/// # Safety
/// `instance` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bpps_solve(
    instance: *const BppsInstance,
    algorithm: u32,
    options: *const BppsSolveOptions,
    out: *mut *mut BppsSolution,
) -> BppsStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let algo = algo_from_code(algorithm)
            .ok_or_else(|| (BppsStatus::InvalidArgument, format!("unknown algorithm code {algorithm}")))?;
        let opts: SolveOptions = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| bpps_solve_options_default())
            .into();
        let outcome = solve(&inst.inner, algo, &opts).map_err(|e| (BppsStatus::Solver, e.to_string()))?;
        let mut assignment = vec![0usize; inst.inner.num_items()];
        for (b, bin) in outcome.solution.bins().iter().enumerate() {
            for &i in bin {
                assignment[i] = b;
            }
        }
        *out = Box::into_raw(Box::new(BppsSolution { outcome, assignment }));
        Ok(())
    })
}

/// # Safety
/// `solution` must come from this library and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_free(solution: *mut BppsSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Largest number of bins used by a single scenario, or 0 for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_value(solution: *const BppsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.outcome.ub)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_lower_bound(solution: *const BppsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.outcome.lb)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_is_optimal(solution: *const BppsSolution) -> bool {
    solution
        .as_ref()
        .is_some_and(|s| s.outcome.status == ProofStatus::Optimal)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_num_bins(solution: *const BppsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.outcome.solution.num_bins())
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_time(solution: *const BppsSolution) -> f64 {
    solution.as_ref().map_or(0.0, |s| s.outcome.time_s)
}

/// Writes the 0-based bin index of every item into `out[0..len]`; `len`
/// must equal the item count.
///
/// # Safety
/// `solution` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_assignment(
    solution: *const BppsSolution,
    out: *mut usize,
    len: usize,
) -> BppsStatus {
    guard(|| {
        let sol = solution.as_ref().ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != sol.assignment.len() {
            return Err((
                BppsStatus::InvalidArgument,
                format!("buffer holds {len} entries, solution has {} items", sol.assignment.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&sol.assignment);
        Ok(())
    })
}

/// JSON solution record; free the string with [`bpps_string_free`].
///
/// # Safety
/// Both handles must be live and `solution` must belong to `instance`.
#[no_mangle]
pub unsafe extern "C" fn bpps_solution_to_json(
    instance: *const BppsInstance,
    solution: *const BppsSolution,
    out: *mut *mut c_char,
) -> BppsStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        let sol = solution.as_ref().ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serialize_solution(&inst.inner, &sol.outcome.solution, &sol.outcome.metadata())
            .map_err(|e| (BppsStatus::Infeasible, e.to_string()))?;
        *out = to_c_string(text);
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bpps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
