//! C ABI for the `branchsim` library.
//!
//! Every fallible call returns a [`BsStatus`]; on failure the message is
//! available from [`bs_last_error_message`] on the same thread. Models and
//! pools are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use branchsim::bootstrap::{run_bootstrap_final, SamplePool};
use branchsim::exact::sample_exact_values;
use branchsim::metrics::{d1_empirical, estimate_h, EmpiricalDistribution, HFunction};
use branchsim::model::{BranchingVector, BranchingVectorSpec, ConditionCase, DistributionSpec, DrawCounts};
use branchsim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    UnsupportedMoment = 3,
    EmptySample = 4,
    NonFiniteSample = 5,
    WrongVariant = 6,
    BudgetExceeded = 7,
    Io = 8,
    Config = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsDistKind {
    Constant = 0,
    Uniform = 1,
    Exponential = 2,
    Poisson = 3,
    Zeta = 4,
    Bernoulli = 5,
}

/// A one-dimensional law. `p1`/`p2` are, by kind: constant (value),
/// uniform (a, b), exponential (rate), poisson (mean), zeta (s), bernoulli (p).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BsDist {
    pub kind: BsDistKind,
    pub p1: f64,
    pub p2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsHKind {
    Identity = 0,
    Abs = 1,
    Power = 2,
    IndicatorGt = 3,
    Clipped = 4,
}

/// Test function `h`; `param` is the exponent, threshold or clip level.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BsH {
    pub kind: BsHKind,
    pub param: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsConditionCase {
    Contractive = 0,
    CriticalCentered = 1,
    Fail = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BsDrawCounts {
    pub vector_draws: u64,
    pub q_draws: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BsMomentReport {
    pub beta: f64,
    pub rho_1: f64,
    pub rho_beta: f64,
    pub q_abs_moment: f64,
    pub q_mean: f64,
    pub condition: BsConditionCase,
}

/// Opaque branching-vector model.
pub struct BsModel(BranchingVector);

/// Opaque bootstrap sample pool.
pub struct BsPool(SamplePool);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BsStatus {
    match err {
        Error::InvalidParameter { .. } => BsStatus::InvalidParameter,
        Error::UnsupportedMoment(_) => BsStatus::UnsupportedMoment,
        Error::EmptySample => BsStatus::EmptySample,
        Error::NonFiniteSample { .. } => BsStatus::NonFiniteSample,
        Error::WrongVariant { .. } => BsStatus::WrongVariant,
        Error::Config { .. } => BsStatus::Config,
        Error::BudgetExceeded { .. } => BsStatus::BudgetExceeded,
        Error::Io { .. } => BsStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BsStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("`{name}` is a null pointer"));
            BsStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            BsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    unsafe { p.as_mut() }.ok_or(Failure::Null(name))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn dist(d: BsDist) -> DistributionSpec {
    match d.kind {
        BsDistKind::Constant => DistributionSpec::Constant { value: d.p1 },
        BsDistKind::Uniform => DistributionSpec::Uniform { a: d.p1, b: d.p2 },
        BsDistKind::Exponential => DistributionSpec::Exponential { rate: d.p1 },
        BsDistKind::Poisson => DistributionSpec::Poisson { mean: d.p1 },
        BsDistKind::Zeta => DistributionSpec::Zeta { s: d.p1 },
        BsDistKind::Bernoulli => DistributionSpec::Bernoulli { p: d.p1 },
    }
}

fn h_function(h: BsH) -> Result<HFunction, Error> {
    Ok(match h.kind {
        BsHKind::Identity => HFunction::Identity,
        BsHKind::Abs => HFunction::Abs,
        BsHKind::Power => HFunction::new_power(h.param)?,
        BsHKind::IndicatorGt => HFunction::IndicatorGt(h.param),
        BsHKind::Clipped => HFunction::Clipped(h.param),
    })
}

fn new_model(spec: BranchingVectorSpec, model_out: *mut *mut BsModel) -> BsStatus {
    guard(|| {
        let slot = unsafe { out(model_out, "model_out") }?;
        *slot = ptr::null_mut();
        let vector = BranchingVector::new(spec)?;
        *slot = Box::into_raw(Box::new(BsModel(vector)));
        Ok(())
    })
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Model with independent `Q`, `N` and i.i.d. weights `C_i`.
#[no_mangle]
pub extern "C" fn bs_model_independent(q: BsDist, n: BsDist, c: BsDist, model_out: *mut *mut BsModel) -> BsStatus {
    new_model(BranchingVectorSpec::Independent { q: dist(q), n: dist(n), c: dist(c) }, model_out)
}

/// The Quicksort branching vector.
#[no_mangle]
pub extern "C" fn bs_model_quicksort(model_out: *mut *mut BsModel) -> BsStatus {
    new_model(BranchingVectorSpec::Quicksort, model_out)
}

/// Homogeneous model (no additive term).
#[no_mangle]
pub extern "C" fn bs_model_homogeneous(n: BsDist, c: BsDist, model_out: *mut *mut BsModel) -> BsStatus {
    new_model(BranchingVectorSpec::Homogeneous { n: dist(n), c: dist(c) }, model_out)
}

/// # Safety
/// `model` must come from a `bs_model_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_model_free(model: *mut BsModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// `rho_beta = E[sum_i |C_i|^beta]`.
///
/// # Safety
/// `model` must be a live handle and `rho_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_model_rho(model: *const BsModel, beta: f64, rho_out: *mut f64) -> BsStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        let slot = unsafe { out(rho_out, "rho_out") }?;
        *slot = m.0.rho(beta)?;
        Ok(())
    })
}

/// Evaluates the convergence conditions at `beta`.
///
/// # Safety
/// `model` must be a live handle and `report_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_model_check(
    model: *const BsModel,
    beta: f64,
    report_out: *mut BsMomentReport,
) -> BsStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        let slot = unsafe { out(report_out, "report_out") }?;
        let r = m.0.check_conditions(beta);
        *slot = BsMomentReport {
            beta: r.beta,
            rho_1: r.rho_1,
            rho_beta: r.rho_beta,
            q_abs_moment: r.q_abs_moment,
            q_mean: r.q_mean,
            condition: match r.case {
                ConditionCase::Contractive => BsConditionCase::Contractive,
                ConditionCase::CriticalCentered => BsConditionCase::CriticalCentered,
                ConditionCase::Fail => BsConditionCase::Fail,
            },
        };
        Ok(())
    })
}

/// Runs the bootstrap to level `k` with pool size `m`. `counts_out` may be NULL.
///
/// # Safety
/// `model` must be a live handle, `pool_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_bootstrap_run(
    model: *const BsModel,
    k: usize,
    m: usize,
    seed: u64,
    pool_out: *mut *mut BsPool,
    counts_out: *mut BsDrawCounts,
) -> BsStatus {
    guard(|| {
        let model = unsafe { deref(model, "model") }?;
        let slot = unsafe { out(pool_out, "pool_out") }?;
        *slot = ptr::null_mut();
        let (pool, counts) = run_bootstrap_final(&model.0, k, m, seed)?;
        write_counts(counts_out, counts);
        *slot = Box::into_raw(Box::new(BsPool(pool)));
        Ok(())
    })
}

fn write_counts(dst: *mut BsDrawCounts, counts: DrawCounts) {
    if let Some(d) = unsafe { dst.as_mut() } {
        *d = BsDrawCounts { vector_draws: counts.vector_draws, q_draws: counts.q_draws };
    }
}

/// Number of values in the pool, 0 for NULL.
///
/// # Safety
/// `pool` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_pool_len(pool: *const BsPool) -> usize {
    unsafe { pool.as_ref() }.map_or(0, |p| p.0.m())
}

/// Level `k` the pool approximates.
///
/// # Safety
/// `pool` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_pool_level(pool: *const BsPool) -> usize {
    unsafe { pool.as_ref() }.map_or(0, |p| p.0.level)
}

/// Copies the pool into `values_out`, which must hold `bs_pool_len(pool)` values.
///
/// # Safety
/// `values_out` must be writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn bs_pool_values(pool: *const BsPool, values_out: *mut f64, capacity: usize) -> BsStatus {
    guard(|| {
        let p = unsafe { deref(pool, "pool") }?;
        let values = &p.0.values;
        if capacity < values.len() {
            return Err(Error::InvalidParameter {
                name: "capacity",
                reason: format!("buffer holds {capacity} values, pool has {}", values.len()),
            }
            .into());
        }
        if values_out.is_null() {
            return Err(Failure::Null("values_out"));
        }
        unsafe { ptr::copy_nonoverlapping(values.as_ptr(), values_out, values.len()) };
        Ok(())
    })
}

/// # Safety
/// `pool` must come from `bs_bootstrap_run` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bs_pool_free(pool: *mut BsPool) {
    if !pool.is_null() {
        drop(unsafe { Box::from_raw(pool) });
    }
}

/// Plug-in estimate of `E[h(R^(k))]` from a pool.
///
/// # Safety
/// `pool` must be a live handle and `estimate_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_estimate_h(pool: *const BsPool, h: BsH, estimate_out: *mut f64) -> BsStatus {
    guard(|| {
        let p = unsafe { deref(pool, "pool") }?;
        let slot = unsafe { out(estimate_out, "estimate_out") }?;
        *slot = estimate_h(&p.0, h_function(h)?);
        Ok(())
    })
}

/// Draws `reps` exact samples of `R^(k)` into `values_out`. Samples that hit
/// `node_budget` are partial; their number goes to `truncated_out` (may be NULL).
///
/// # Safety
/// `values_out` must be writable for `reps` doubles.
#[no_mangle]
pub unsafe extern "C" fn bs_exact_sample(
    model: *const BsModel,
    k: usize,
    reps: usize,
    seed: u64,
    node_budget: u64,
    values_out: *mut f64,
    counts_out: *mut BsDrawCounts,
    truncated_out: *mut u64,
) -> BsStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        if reps > 0 && values_out.is_null() {
            return Err(Failure::Null("values_out"));
        }
        let (values, counts, truncated) = sample_exact_values(&m.0, k, reps, seed, node_budget)?;
        if reps > 0 {
            unsafe { ptr::copy_nonoverlapping(values.as_ptr(), values_out, reps) };
        }
        write_counts(counts_out, counts);
        if let Some(t) = unsafe { truncated_out.as_mut() } {
            *t = truncated;
        }
        Ok(())
    })
}

/// Wasserstein-1 distance between the empirical laws of two samples.
///
/// # Safety
/// `a` and `b` must be readable for `a_len` and `b_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bs_d1_empirical(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    distance_out: *mut f64,
) -> BsStatus {
    guard(|| {
        let a = EmpiricalDistribution::from_slice(unsafe { slice(a, a_len, "a") }?)?;
        let b = EmpiricalDistribution::from_slice(unsafe { slice(b, b_len, "b") }?)?;
        *unsafe { out(distance_out, "distance_out") }? = d1_empirical(&a, &b);
        Ok(())
    })
}
