//! C ABI for the minpath solver.
//!
//! Instances and solutions are opaque handles created and destroyed through
//! this API. Every fallible call returns a [`MinpathStatus`]; on failure the
//! message is available from [`minpath_last_error_message`] on the same
//! thread. Strings returned by the library are freed with
//! [`minpath_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use minpath::instance::{normalize_terminals, validate};
use minpath::round::{solve, solve_prize, solve_steiner};
use minpath::separator::{min_color_separator, SeparatorOutcome};
use minpath::{Config, Error, Instance, Mode, Solution, Strategy};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinpathStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInstance = 4,
    NotPlanar = 5,
    Disconnected = 6,
    OutOfRange = 7,
    BadWeights = 8,
    InvalidConfig = 9,
    IterationLimit = 10,
    InvariantViolation = 11,
    LimitExceeded = 12,
    BufferTooSmall = 13,
    Internal = 14,
    Panic = 15,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinpathStrategy {
    BallCarving = 0,
    KprChop = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinpathProblem {
    /// Single pair, fewest colors.
    Path = 0,
    /// Every pair must be connected.
    Steiner = 1,
    /// Pairs with finite prizes may be forfeited.
    Prize = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MinpathOptions {
    pub epsilon: f64,
    pub tolerance: f64,
    pub strategy: MinpathStrategy,
    /// Add colors greedily instead of failing when rounding leaves a pair
    /// disconnected.
    pub repair: bool,
}

/// Opaque instance handle.
pub struct MinpathInstance(Instance);

/// Opaque solution handle.
pub struct MinpathSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> MinpathStatus {
    match err {
        Error::Parse { .. } | Error::Io(_) => MinpathStatus::Parse,
        Error::InvalidInstance(_) | Error::EulerViolation { .. } | Error::NotNormalized { .. } => {
            MinpathStatus::InvalidInstance
        }
        Error::NotPlanar => MinpathStatus::NotPlanar,
        Error::Disconnected { .. } => MinpathStatus::Disconnected,
        Error::VertexOutOfRange(_) | Error::PairOutOfRange(_) => MinpathStatus::OutOfRange,
        Error::WeightCount { .. } | Error::BadWeight { .. } => MinpathStatus::BadWeights,
        Error::InvalidConfig(_) | Error::InvalidDelta(_) | Error::InvalidParams(_) => MinpathStatus::InvalidConfig,
        Error::IterationLimit { .. } => MinpathStatus::IterationLimit,
        Error::InvariantViolation { .. } => MinpathStatus::InvariantViolation,
        Error::LimitExceeded { .. } => MinpathStatus::LimitExceeded,
        Error::Simplex(_) | Error::EmptyGroup { .. } | Error::Internal(_) => MinpathStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic for `minpath_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (MinpathStatus, String)>) -> MinpathStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MinpathStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside minpath");
            MinpathStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (MinpathStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MinpathStatus, String) {
    (MinpathStatus::NullPointer, format!("{what} is null"))
}

unsafe fn instance_ref<'a>(inst: *const MinpathInstance) -> Result<&'a Instance, (MinpathStatus, String)> {
    inst.as_ref().map(|i| &i.0).ok_or_else(|| null("instance"))
}

unsafe fn solution_ref<'a>(sol: *const MinpathSolution) -> Option<&'a Solution> {
    sol.as_ref().map(|s| &s.0)
}

/// Copies `items` into `buf` when it is large enough; the full length is
/// always returned so callers can size a second call.
unsafe fn fill<T: Copy>(items: &[T], buf: *mut T, cap: usize) -> usize {
    if !buf.is_null() && items.len() <= cap {
        ptr::copy_nonoverlapping(items.as_ptr(), buf, items.len());
    }
    items.len()
}

#[no_mangle]
pub extern "C" fn minpath_options_default() -> MinpathOptions {
    let c = Config::default();
    MinpathOptions {
        epsilon: c.epsilon,
        tolerance: c.tolerance,
        strategy: MinpathStrategy::BallCarving,
        repair: false,
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn minpath_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn minpath_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a JSON instance. Only the format is checked here; call
/// `minpath_instance_validate` for the structural invariants.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn minpath_instance_from_json(json: *const c_char, out: *mut *mut MinpathInstance) -> MinpathStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (MinpathStatus::InvalidUtf8, e.to_string()))?;
        let inst = minpath::instance::parse(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MinpathInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle from `minpath_instance_from_json`.
#[no_mangle]
pub unsafe extern "C" fn minpath_instance_free(inst: *mut MinpathInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_instance_num_vertices(inst: *const MinpathInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.graph.num_vertices())
}

/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_instance_num_colors(inst: *const MinpathInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.num_colors())
}

/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_instance_num_pairs(inst: *const MinpathInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.terminals.len())
}

/// `Ok` when every invariant holds; otherwise `InvalidInstance` with the
/// violations in the error message.
///
/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_instance_validate(inst: *const MinpathInstance) -> MinpathStatus {
    guard(|| {
        let report = validate(instance_ref(inst)?);
        if report.violations.is_empty() {
            Ok(())
        } else {
            Err(lib_err(Error::InvalidInstance(report)))
        }
    })
}

/// Runs the approximation algorithm. `options` may be null for defaults.
///
/// # Safety
/// `inst` must be a live instance handle, `options` null or valid, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn minpath_solve(
    inst: *const MinpathInstance,
    problem: MinpathProblem,
    options: *const MinpathOptions,
    out: *mut *mut MinpathSolution,
) -> MinpathStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inst = instance_ref(inst)?;
        let opts = options.as_ref().copied().unwrap_or_else(|| minpath_options_default());
        let config = Config {
            epsilon: opts.epsilon,
            tolerance: opts.tolerance,
            strategy: match opts.strategy {
                MinpathStrategy::BallCarving => Strategy::BallCarving,
                MinpathStrategy::KprChop => Strategy::KprChop,
            },
            mode: if opts.repair { Mode::Repair } else { Mode::Strict },
            ..Config::default()
        };
        let sol = match problem {
            MinpathProblem::Path => solve(inst, &config),
            MinpathProblem::Steiner => solve_steiner(inst, &config),
            MinpathProblem::Prize => solve_prize(inst, &config),
        }
        .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MinpathSolution(sol)));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle from `minpath_solve`.
#[no_mangle]
pub unsafe extern "C" fn minpath_solution_free(sol: *mut MinpathSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_solution_objective(sol: *const MinpathSolution) -> f64 {
    solution_ref(sol).map_or(f64::NAN, |s| s.objective)
}

/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_solution_lower_bound(sol: *const MinpathSolution) -> f64 {
    solution_ref(sol).map_or(f64::NAN, |s| s.lower_bound)
}

/// Writes the chosen colors into `buf` if `cap` suffices and returns how
/// many there are.
///
/// # Safety
/// `sol` must be null or a live solution handle; `buf` must be null or
/// point to `cap` writable elements.
#[no_mangle]
pub unsafe extern "C" fn minpath_solution_colors(sol: *const MinpathSolution, buf: *mut usize, cap: usize) -> usize {
    solution_ref(sol).map_or(0, |s| fill(s.colors.as_slice(), buf, cap))
}

/// Vertex path of pair `pair`, same buffer protocol as
/// `minpath_solution_colors`. Returns 0 for forfeited or unknown pairs.
///
/// # Safety
/// As for `minpath_solution_colors`.
#[no_mangle]
pub unsafe extern "C" fn minpath_solution_path(
    sol: *const MinpathSolution,
    pair: usize,
    buf: *mut usize,
    cap: usize,
) -> usize {
    let path = solution_ref(sol)
        .and_then(|s| s.paths.get(pair))
        .and_then(|p| p.path.as_deref());
    path.map_or(0, |p| fill(p, buf, cap))
}

/// Full solution as JSON; free with `minpath_string_free`. Null on error.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn minpath_solution_to_json(sol: *const MinpathSolution) -> *mut c_char {
    let Some(s) = solution_ref(sol) else {
        set_error("solution is null");
        return ptr::null_mut();
    };
    match serde_json::to_string(s).map(CString::new) {
        Ok(Ok(c)) => c.into_raw(),
        _ => {
            set_error("solution could not be serialized");
            ptr::null_mut()
        }
    }
}

/// Minimum-weight color separator for pair `pair` after removing terminal
/// colors. `weights` holds one entry per color. On success `*found` says
/// whether any separator exists; if so its colors go to `buf` (when
/// `cap` suffices), their count to `*count` and the weight to `*weight`.
///
/// # Safety
/// `inst` must be a live handle; `weights` must point to `num_weights`
/// values; `buf` null or `cap` writable elements; the out pointers valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn minpath_min_separator(
    inst: *const MinpathInstance,
    pair: usize,
    weights: *const f64,
    num_weights: usize,
    buf: *mut usize,
    cap: usize,
    found: *mut bool,
    count: *mut usize,
    weight: *mut f64,
) -> MinpathStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        if found.is_null() || count.is_null() || weight.is_null() {
            return Err(null("output pointer"));
        }
        let w: &[f64] = if num_weights == 0 {
            &[]
        } else if weights.is_null() {
            return Err(null("weights"));
        } else {
            std::slice::from_raw_parts(weights, num_weights)
        };
        let p = inst.pair(pair).map_err(lib_err)?;
        let (norm, _) = normalize_terminals(inst);
        *found = false;
        *count = 0;
        *weight = 0.0;
        match min_color_separator(&norm.graph, w, p.s, p.t).map_err(lib_err)? {
            SeparatorOutcome::NoSeparator => Ok(()),
            SeparatorOutcome::Separator(r) => {
                *found = true;
                *weight = r.weight;
                *count = r.colors.len();
                if !buf.is_null() && r.colors.len() > cap {
                    return Err((MinpathStatus::BufferTooSmall, format!("need {} slots", r.colors.len())));
                }
                fill(r.colors.as_slice(), buf, cap);
                Ok(())
            }
        }
    })
}
