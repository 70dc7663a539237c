//! C ABI for the noninertial bosonic channel library.
//!
//! Conventions:
//! - Channels and states are opaque handles created by `*_new` constructors
//!   and released by the matching `*_free` (which accepts NULL).
//! - Every fallible call returns an [`UnruhStatus`]; results are written
//!   through out-pointers only on `UNRUH_STATUS_OK`.
//! - On failure a thread-local message is set; read it with
//!   [`unruh_last_error_message`]. The pointer stays valid until the next
//!   failing call on the same thread.
//! - Matrices cross the boundary as row-major `dim * dim` arrays of doubles,
//!   real and imaginary parts in separate buffers (a NULL imaginary buffer
//!   means all-zero on input and "don't copy" on output).
//! - Panics never unwind across the boundary; they surface as
//!   `UNRUH_STATUS_INTERNAL_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use unruh_core::channel::{
    apply_channel, kraus_multiparty, r_from_omega, truncation_tail, AccelerationParam,
    ChannelSpec, KrausSet, DEFAULT_EPSILON,
};
use unruh_core::error::Error;
use unruh_core::fock::{C64, CMatrix, DensityMatrix, DimSignature};
use unruh_core::measures;
use unruh_core::states;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnruhStatus {
    /// Success; out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument value was rejected (range, parse, or preset errors).
    InvalidArgument = 2,
    /// Array or party dimensions disagree with the handle.
    DimensionMismatch = 3,
    /// A matrix was not a physical density matrix (Hermiticity,
    /// positivity, or trace).
    NotPhysical = 4,
    /// The construction would exceed a resource budget.
    BudgetExceeded = 5,
    /// Requested operation is defined only for other dimensions.
    UnsupportedDimension = 6,
    /// A property-suite assertion failed.
    PropertyFailed = 7,
    /// Unexpected internal error.
    Internal = 8,
    /// A panic was caught at the boundary.
    InternalPanic = 9,
}

/// Opaque handle to a certified channel (Kraus set plus its spec).
pub struct UnruhChannel {
    ks: KrausSet,
}

/// Opaque handle to a multiparty density matrix.
pub struct UnruhState {
    rho: DensityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: &Error) -> UnruhStatus {
    set_error(e.to_string());
    match e {
        Error::DimensionMismatch { .. } => UnruhStatus::DimensionMismatch,
        Error::InvalidArgument(_) | Error::DivergentAcceleration { .. } => {
            UnruhStatus::InvalidArgument
        }
        Error::NotHermitian { .. } | Error::NotPositive { .. } | Error::TraceMismatch { .. } => {
            UnruhStatus::NotPhysical
        }
        Error::BudgetExceeded { .. } => UnruhStatus::BudgetExceeded,
        Error::UnsupportedDimension { .. } => UnruhStatus::UnsupportedDimension,
        Error::PropertyFailed(_) => UnruhStatus::PropertyFailed,
        Error::Io(_) | Error::Json(_) => UnruhStatus::Internal,
    }
}

fn null_pointer(what: &str) -> UnruhStatus {
    set_error(format!("{what} must not be NULL"));
    UnruhStatus::NullPointer
}

/// Run `f` with panics converted to a status code.
fn guarded(f: impl FnOnce() -> UnruhStatus) -> UnruhStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic caught at the C boundary".into());
        UnruhStatus::InternalPanic
    })
}

/// Last error message for this thread, as a NUL-terminated string.
///
/// Never NULL; empty before the first failure. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn unruh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn unruh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ---------------------------------------------------------------------------
// channel handles
// ---------------------------------------------------------------------------

/// Build a certified channel.
///
/// `local_dims[n_parties]` are per-party input dimensions; `accelerated`
/// and `r` list the accelerated party indices and their acceleration
/// parameters (`n_accelerated` entries each). Per-party cutoffs are chosen
/// so the truncation tail stays below `epsilon`; pass `epsilon <= 0` for
/// the default target of 1e-10.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out_channel` receives an
/// owned handle that must be released with [`unruh_channel_free`].
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_new(
    local_dims: *const usize,
    n_parties: usize,
    accelerated: *const usize,
    n_accelerated: usize,
    r: *const f64,
    epsilon: f64,
    out_channel: *mut *mut UnruhChannel,
) -> UnruhStatus {
    guarded(|| {
        if out_channel.is_null() {
            return null_pointer("out_channel");
        }
        if local_dims.is_null() || accelerated.is_null() || r.is_null() {
            return null_pointer("local_dims/accelerated/r");
        }
        let dims = slice::from_raw_parts(local_dims, n_parties).to_vec();
        let acc = slice::from_raw_parts(accelerated, n_accelerated).to_vec();
        let rs = slice::from_raw_parts(r, n_accelerated);
        let eps = if epsilon <= 0.0 { DEFAULT_EPSILON } else { epsilon };
        let params: Result<Vec<AccelerationParam>, Error> =
            rs.iter().map(|&x| AccelerationParam::from_r(x)).collect();
        let spec = params.and_then(|p| ChannelSpec::certified(dims, acc, p, eps));
        match spec.and_then(|s| kraus_multiparty(&s)) {
            Ok(ks) => {
                out_channel.write(Box::into_raw(Box::new(UnruhChannel { ks })));
                UnruhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a channel handle (NULL is a no-op).
///
/// # Safety
/// `channel` must be a handle from [`unruh_channel_new`], released once.
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_free(channel: *mut UnruhChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Number of Kraus operators.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_kraus_count(
    channel: *const UnruhChannel,
    out: *mut usize,
) -> UnruhStatus {
    guarded(|| {
        let (Some(ch), false) = (channel.as_ref(), out.is_null()) else {
            return null_pointer("channel/out");
        };
        out.write(ch.ks.ops().len());
        UnruhStatus::Ok
    })
}

/// Completeness defect max |I - sum A^dag A| (bounded by the tail).
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_completeness_defect(
    channel: *const UnruhChannel,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(ch), false) = (channel.as_ref(), out.is_null()) else {
            return null_pointer("channel/out");
        };
        out.write(ch.ks.completeness_defect());
        UnruhStatus::Ok
    })
}

/// Certified bound on the trace deficit of any output.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_tail_bound(
    channel: *const UnruhChannel,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(ch), false) = (channel.as_ref(), out.is_null()) else {
            return null_pointer("channel/out");
        };
        out.write(ch.ks.tail_bound());
        UnruhStatus::Ok
    })
}

/// Kraus cutoff chosen for the `index`-th accelerated party.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_cutoff(
    channel: *const UnruhChannel,
    index: usize,
    out: *mut usize,
) -> UnruhStatus {
    guarded(|| {
        let (Some(ch), false) = (channel.as_ref(), out.is_null()) else {
            return null_pointer("channel/out");
        };
        let cutoffs = ch.ks.spec().cutoffs();
        if index >= cutoffs.len() {
            set_error(format!(
                "accelerated index {index} out of range ({} accelerated parties)",
                cutoffs.len()
            ));
            return UnruhStatus::InvalidArgument;
        }
        out.write(cutoffs[index]);
        UnruhStatus::Ok
    })
}

/// Apply the channel; the result is a new state handle on the enlarged
/// output space.
///
/// # Safety
/// Handles must be live; `out_state` receives an owned handle to release
/// with [`unruh_state_free`].
#[no_mangle]
pub unsafe extern "C" fn unruh_channel_apply(
    channel: *const UnruhChannel,
    state: *const UnruhState,
    out_state: *mut *mut UnruhState,
) -> UnruhStatus {
    guarded(|| {
        let (Some(ch), Some(st), false) = (channel.as_ref(), state.as_ref(), out_state.is_null())
        else {
            return null_pointer("channel/state/out_state");
        };
        match apply_channel(&ch.ks, &st.rho) {
            Ok(rho) => {
                out_state.write(Box::into_raw(Box::new(UnruhState { rho })));
                UnruhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// state handles
// ---------------------------------------------------------------------------

/// Build a state from a row-major density matrix.
///
/// `dims[n_parties]` are party dimensions with product `d`; `re` (and `im`,
/// which may be NULL for a real matrix) hold `d * d` entries. The matrix
/// must be Hermitian, positive semidefinite, and unit trace within the
/// library tolerances.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out_state` receives an
/// owned handle to release with [`unruh_state_free`].
#[no_mangle]
pub unsafe extern "C" fn unruh_state_new(
    dims: *const usize,
    n_parties: usize,
    re: *const f64,
    im: *const f64,
    out_state: *mut *mut UnruhState,
) -> UnruhStatus {
    guarded(|| {
        if out_state.is_null() {
            return null_pointer("out_state");
        }
        if dims.is_null() || re.is_null() {
            return null_pointer("dims/re");
        }
        let sig = match DimSignature::new(slice::from_raw_parts(dims, n_parties).to_vec()) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let d = sig.total();
        let re = slice::from_raw_parts(re, d * d);
        let im = if im.is_null() {
            None
        } else {
            Some(slice::from_raw_parts(im, d * d))
        };
        let m = CMatrix::from_fn(d, d, |i, j| {
            C64::new(re[i * d + j], im.map_or(0.0, |b| b[i * d + j]))
        });
        match DensityMatrix::new(sig, m) {
            Ok(rho) => {
                out_state.write(Box::into_raw(Box::new(UnruhState { rho })));
                UnruhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// The two-qubit Bell state (|00> + |11>)/sqrt(2).
///
/// # Safety
/// `out_state` receives an owned handle to release with
/// [`unruh_state_free`].
#[no_mangle]
pub unsafe extern "C" fn unruh_state_bell_phi_plus(out_state: *mut *mut UnruhState) -> UnruhStatus {
    guarded(|| {
        if out_state.is_null() {
            return null_pointer("out_state");
        }
        out_state.write(Box::into_raw(Box::new(UnruhState {
            rho: states::bell_phi_plus(),
        })));
        UnruhStatus::Ok
    })
}

/// Release a state handle (NULL is a no-op).
///
/// # Safety
/// `state` must be a handle from this library, released once.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_free(state: *mut UnruhState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Total Hilbert-space dimension (product of party dimensions).
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_dim(state: *const UnruhState, out: *mut usize) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), out.is_null()) else {
            return null_pointer("state/out");
        };
        out.write(st.rho.sig().total());
        UnruhStatus::Ok
    })
}

/// Number of parties.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_party_count(
    state: *const UnruhState,
    out: *mut usize,
) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), out.is_null()) else {
            return null_pointer("state/out");
        };
        out.write(st.rho.sig().len());
        UnruhStatus::Ok
    })
}

/// Dimension of one party.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_party_dim(
    state: *const UnruhState,
    party: usize,
    out: *mut usize,
) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), out.is_null()) else {
            return null_pointer("state/out");
        };
        let dims = st.rho.sig().dims();
        if party >= dims.len() {
            set_error(format!(
                "party {party} out of range ({} parties)",
                dims.len()
            ));
            return UnruhStatus::InvalidArgument;
        }
        out.write(dims[party]);
        UnruhStatus::Ok
    })
}

/// Trace of the stored matrix.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_trace(state: *const UnruhState, out: *mut f64) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), out.is_null()) else {
            return null_pointer("state/out");
        };
        out.write(st.rho.trace());
        UnruhStatus::Ok
    })
}

/// Accumulated truncation-induced trace deficit.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_trace_deficit(
    state: *const UnruhState,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), out.is_null()) else {
            return null_pointer("state/out");
        };
        out.write(st.rho.trace_deficit());
        UnruhStatus::Ok
    })
}

/// Copy the density matrix out, row-major. `re` must hold `dim * dim`
/// doubles; `im` may be NULL to skip the imaginary part.
///
/// # Safety
/// `state` must be a live handle; buffers must be valid for `dim * dim`
/// doubles each (query `dim` with [`unruh_state_dim`]).
#[no_mangle]
pub unsafe extern "C" fn unruh_state_copy_matrix(
    state: *const UnruhState,
    re: *mut f64,
    im: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), re.is_null()) else {
            return null_pointer("state/re");
        };
        let d = st.rho.sig().total();
        let m = st.rho.matrix();
        let re = slice::from_raw_parts_mut(re, d * d);
        let mut im = if im.is_null() {
            None
        } else {
            Some(slice::from_raw_parts_mut(im, d * d))
        };
        for i in 0..d {
            for j in 0..d {
                re[i * d + j] = m[(i, j)].re;
                if let Some(buf) = im.as_deref_mut() {
                    buf[i * d + j] = m[(i, j)].im;
                }
            }
        }
        UnruhStatus::Ok
    })
}

/// Sum of absolute values of off-diagonal entries.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_l1_coherence(
    state: *const UnruhState,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false) = (state.as_ref(), out.is_null()) else {
            return null_pointer("state/out");
        };
        out.write(measures::l1_coherence(&st.rho));
        UnruhStatus::Ok
    })
}

/// Negativity across the cut obtained by transposing the listed parties.
///
/// # Safety
/// `state` must be a live handle; `transpose_parties` must be valid for
/// `n_transpose` entries; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_state_negativity(
    state: *const UnruhState,
    transpose_parties: *const usize,
    n_transpose: usize,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(st), false, false) = (
            state.as_ref(),
            transpose_parties.is_null(),
            out.is_null(),
        ) else {
            return null_pointer("state/transpose_parties/out");
        };
        let parties = slice::from_raw_parts(transpose_parties, n_transpose);
        match measures::negativity(&st.rho, parties) {
            Ok(v) => {
                out.write(v);
                UnruhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Trace distance (1/2)||a - b||_1 between two states on the same space.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_trace_distance(
    a: *const UnruhState,
    b: *const UnruhState,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        let (Some(a), Some(b), false) = (a.as_ref(), b.as_ref(), out.is_null()) else {
            return null_pointer("a/b/out");
        };
        match measures::trace_distance(&a.rho, &b.rho) {
            Ok(v) => {
                out.write(v);
                UnruhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// scalar helpers
// ---------------------------------------------------------------------------

/// Map a Rindler frequency to the acceleration parameter r.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_r_from_omega(omega: f64, out: *mut f64) -> UnruhStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        match r_from_omega(omega) {
            Ok(r) => {
                out.write(r);
                UnruhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Probability weight discarded when capping excitation `level`'s Kraus
/// series at `cutoff`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unruh_truncation_tail(
    r: f64,
    level: usize,
    cutoff: usize,
    out: *mut f64,
) -> UnruhStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        out.write(truncation_tail(r, level, cutoff));
        UnruhStatus::Ok
    })
}
