//! C ABI over `korobov-qmc`.
//!
//! Point sets are opaque handles created by [`kq_pointset_new`] and released
//! with [`kq_pointset_free`]. Every fallible call returns a [`KqStatus`];
//! on failure [`kq_last_error_message`] describes the error for the calling
//! thread. Panics never cross the boundary and surface as
//! `KQ_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use korobov_qmc::{
    composite_point_set, info_complexity_bound, prime_band, qmc_apply, wce_truncated, wce_upper,
    weyl_sum_composite, CompositePointSet, Error, Frequency, Integrand, KorobovFamily, ScanOptions,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KqStatus {
    Ok = 0,
    DomainError = 1,
    CapacityError = 2,
    NullPointer = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KqFamily {
    S = 0,
    T = 1,
    U = 2,
}

// families arrive as plain integers so an out-of-range value from C is an
// error code rather than an invalid enum
fn family_from_raw(raw: u32) -> Result<KorobovFamily, KqStatus> {
    match raw {
        x if x == KqFamily::S as u32 => Ok(KorobovFamily::S),
        x if x == KqFamily::T as u32 => Ok(KorobovFamily::T),
        x if x == KqFamily::U as u32 => Ok(KorobovFamily::U),
        other => Err(fail(
            KqStatus::DomainError,
            format!("unknown family {other}"),
        )),
    }
}

/// Opaque composite point set.
pub struct KqPointSet {
    inner: CompositePointSet,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KqWceEstimate {
    pub lower: f64,
    pub upper: f64,
    pub radius: u64,
    pub frequencies_checked: u64,
    /// Nonzero when `lower` is the exact worst-case error.
    pub exact: u8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KqWceBounds {
    pub count: u64,
    pub bound_in_m: f64,
    pub bound_in_n: f64,
    pub initial_error: f64,
    pub vacuous: u8,
}

/// Integrand callback: `x` points at `d` coordinates in `[0,1)`.
pub type KqIntegrand =
    Option<unsafe extern "C" fn(x: *const f64, d: usize, user: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: KqStatus, msg: impl Into<String>) -> KqStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> KqStatus {
    let status = match e {
        Error::Capacity(_) => KqStatus::CapacityError,
        Error::Domain(_) => KqStatus::DomainError,
        _ => KqStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> KqStatus) -> KqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(KqStatus::Internal, "internal panic"),
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the composite set of `family` (a [`KqFamily`] value) over the band
/// of `m` in dimension `d`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_new(
    family: u32,
    m: u64,
    d: usize,
    out: *mut *mut KqPointSet,
) -> KqStatus {
    if out.is_null() {
        return fail(KqStatus::NullPointer, "out is null");
    }
    *out = ptr::null_mut();
    let family = match family_from_raw(family) {
        Ok(f) => f,
        Err(s) => return s,
    };
    guard(|| match composite_point_set(family, m, d) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(KqPointSet { inner }));
            KqStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// # Safety
/// `set` must be NULL or a handle from [`kq_pointset_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_free(set: *mut KqPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_count(set: *const KqPointSet, out: *mut u64) -> KqStatus {
    if set.is_null() || out.is_null() {
        return fail(KqStatus::NullPointer, "null argument");
    }
    *out = (*set).inner.total_count();
    KqStatus::Ok
}

/// # Safety
/// `set` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_dim(set: *const KqPointSet, out: *mut usize) -> KqStatus {
    if set.is_null() || out.is_null() {
        return fail(KqStatus::NullPointer, "null argument");
    }
    *out = (*set).inner.dim();
    KqStatus::Ok
}

/// Copies all points, row-major, into `buf` of `len` doubles; `len` must be
/// at least `count * dim`.
///
/// # Safety
/// `set` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_coords(
    set: *const KqPointSet,
    buf: *mut f64,
    len: usize,
) -> KqStatus {
    if set.is_null() || buf.is_null() {
        return fail(KqStatus::NullPointer, "null argument");
    }
    let cps = &(*set).inner;
    let needed = cps.total_count() as usize * cps.dim();
    if len < needed {
        return fail(
            KqStatus::DomainError,
            format!("buffer holds {len} values, {needed} needed"),
        );
    }
    let out = std::slice::from_raw_parts_mut(buf, needed);
    guard(|| {
        let mut at = 0;
        cps.for_each_unit_point(|x| {
            out[at..at + x.len()].copy_from_slice(x);
            at += x.len();
        });
        KqStatus::Ok
    })
}

/// Normalized exponential sum `W(k)` for `k` of length `d`.
///
/// # Safety
/// `set` must be a live handle, `k` valid for `d` reads, `re` and `im` for
/// one write each.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_weyl_sum(
    set: *const KqPointSet,
    k: *const i64,
    d: usize,
    re: *mut f64,
    im: *mut f64,
) -> KqStatus {
    if set.is_null() || k.is_null() || re.is_null() || im.is_null() {
        return fail(KqStatus::NullPointer, "null argument");
    }
    let k = Frequency::new(std::slice::from_raw_parts(k, d).to_vec());
    guard(|| match weyl_sum_composite(&(*set).inner, &k) {
        Ok(w) => {
            *re = w.value.re;
            *im = w.value.im;
            KqStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Two-sided worst-case error estimate over `|k|_inf <= radius`.
///
/// # Safety
/// `set` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn kq_pointset_wce(
    set: *const KqPointSet,
    radius: u64,
    out: *mut KqWceEstimate,
) -> KqStatus {
    if set.is_null() || out.is_null() {
        return fail(KqStatus::NullPointer, "null argument");
    }
    guard(
        || match wce_truncated(&(*set).inner, radius, ScanOptions::default()) {
            Ok(est) => {
                *out = KqWceEstimate {
                    lower: est.lower,
                    upper: est.upper,
                    radius: est.k_radius,
                    frequencies_checked: est.frequencies_checked,
                    exact: est.exact as u8,
                };
                KqStatus::Ok
            }
            Err(e) => from_error(e),
        },
    )
}

/// Upper bounds for `family` (a [`KqFamily`] value).
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn kq_wce_upper(
    family: u32,
    m: u64,
    d: usize,
    c_p: f64,
    out: *mut KqWceBounds,
) -> KqStatus {
    if out.is_null() {
        return fail(KqStatus::NullPointer, "out is null");
    }
    let family = match family_from_raw(family) {
        Ok(f) => f,
        Err(s) => return s,
    };
    guard(|| match wce_upper(family, m, d, c_p) {
        Ok(b) => {
            *out = KqWceBounds {
                count: b.n,
                bound_in_m: b.bound_in_m,
                bound_in_n: b.bound_in_n,
                initial_error: b.initial_error,
                vacuous: b.vacuous as u8,
            };
            KqStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Number of primes `p` with `ceil(m/2) < p <= m`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn kq_prime_band_count(m: u64, out: *mut u64) -> KqStatus {
    if out.is_null() {
        return fail(KqStatus::NullPointer, "out is null");
    }
    guard(|| match prime_band(m) {
        Ok(b) => {
            *out = b.count() as u64;
            KqStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn kq_info_complexity_bound(
    eps: f64,
    d: usize,
    c_p: f64,
    out: *mut u64,
) -> KqStatus {
    if out.is_null() {
        return fail(KqStatus::NullPointer, "out is null");
    }
    guard(|| match info_complexity_bound(eps, d, c_p) {
        Ok(n) => {
            *out = n;
            KqStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

struct Callback {
    f: unsafe extern "C" fn(*const f64, usize, *mut c_void) -> f64,
    user: *mut c_void,
    d: usize,
}

impl Integrand for Callback {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[f64]) -> f64 {
        unsafe { (self.f)(x.as_ptr(), x.len(), self.user) }
    }
}

/// QMC estimate `(1/N) sum f(x)` with `f` called once per point.
///
/// # Safety
/// `set` must be a live handle, `f` safe to call with `user`, and `out`
/// valid for one write. `f` must not unwind.
#[no_mangle]
pub unsafe extern "C" fn kq_qmc_apply(
    set: *const KqPointSet,
    f: KqIntegrand,
    user: *mut c_void,
    out: *mut f64,
) -> KqStatus {
    let Some(f) = f else {
        return fail(KqStatus::NullPointer, "integrand is null");
    };
    if set.is_null() || out.is_null() {
        return fail(KqStatus::NullPointer, "null argument");
    }
    let cps = &(*set).inner;
    let cb = Callback {
        f,
        user,
        d: cps.dim(),
    };
    guard(|| match qmc_apply(cps, &cb) {
        Ok(v) => {
            *out = v;
            KqStatus::Ok
        }
        Err(e) => from_error(e),
    })
}
