//! C ABI for `cvbell`.
//!
//! States are opaque handles built from the same JSON documents the CLI
//! reads. Every fallible call returns a [`CvbStatus`]; on failure the
//! message is available from [`cvb_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cvbell::cfrd::{cfrd_evaluate, verify_implication, CfrdReport, QuadratureSettings};
use cvbell::cli::{SpecError, State, StateSpecDocument};
use cvbell::error::Error;
use cvbell::fock::partial_transpose_min_eig;
use cvbell::modeset::ModeSet;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The state document is not valid JSON or names unknown fields.
    Parse = 3,
    /// Settings are malformed (lengths, signs, δ range).
    InvalidSettings = 4,
    /// An operator needs more headroom than the state guarantees.
    Headroom = 5,
    /// A truncation budget, normalization or numerical check failed.
    Numerical = 6,
    /// The operation does not apply to this state or argument.
    InvalidArgument = 7,
    Panic = 8,
}

/// Opaque state handle.
pub struct CvbState {
    inner: State,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CvbReport {
    pub lhs: f64,
    pub rhs: f64,
    pub s_squared: f64,
    pub product_number_moment: f64,
    pub minor_d: f64,
    pub beta: f64,
    pub b_product_re: f64,
    pub b_product_im: f64,
    /// Bit k set when mode k has `s_k = -1`.
    pub bipartition: u64,
    pub trivial_bipartition: bool,
    pub violated: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CvbVerification {
    pub report: CvbReport,
    /// False when no dense oracle ran; `pt_min_eig` is then NaN.
    pub has_pt_min_eig: bool,
    pub pt_min_eig: f64,
    pub consistent: bool,
}

impl From<&CfrdReport> for CvbReport {
    fn from(r: &CfrdReport) -> Self {
        Self {
            lhs: r.lhs,
            rhs: r.rhs,
            s_squared: r.s_squared,
            product_number_moment: r.product_number_moment,
            minor_d: r.minor_d,
            beta: r.beta,
            b_product_re: r.b_product.re,
            b_product_im: r.b_product.im,
            bipartition: r.bipartition.mask(),
            trivial_bipartition: r.trivial_bipartition,
            violated: r.violated,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("interior nuls removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> CvbStatus {
    match e {
        Error::InvalidSettings(_) => CvbStatus::InvalidSettings,
        Error::Headroom { .. } => CvbStatus::Headroom,
        Error::TruncationBudget { .. } | Error::DegenerateNormalization(_) | Error::Numerical(_) => {
            CvbStatus::Numerical
        }
        Error::CutoffViolation { .. }
        | Error::TrivialBipartition(_)
        | Error::InvalidModeSpec(_)
        | Error::InvalidArgument(_) => CvbStatus::InvalidArgument,
    }
}

struct Failure(CvbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Malformed(m) => Failure(CvbStatus::Parse, m),
            SpecError::Physics(e) => e.into(),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CvbStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, recording any failure or panic for `cvb_last_error_message`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CvbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CvbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CvbStatus::Panic
        }
    }
}

/// # Safety
/// `state` must be null or a live handle from [`cvb_state_from_json`].
unsafe fn state_ref<'a>(state: *const CvbState) -> Result<&'a State, Failure> {
    state.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

/// # Safety
/// Non-null pointers must reference `n` readable elements.
unsafe fn settings_from_raw(
    theta: *const f64,
    delta: *const f64,
    s: *const i8,
    n: usize,
) -> Result<QuadratureSettings, Failure> {
    if s.is_null() {
        return Err(null("s"));
    }
    let read = |p: *const f64| -> Vec<f64> {
        if p.is_null() {
            vec![0.0; n]
        } else {
            std::slice::from_raw_parts(p, n).to_vec()
        }
    };
    let signs = std::slice::from_raw_parts(s, n).to_vec();
    Ok(QuadratureSettings::new(read(theta), read(delta), signs)?)
}

/// Builds a state from a JSON specification (the CLI's state document).
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
/// On success `*out` owns a handle to be released with [`cvb_state_free`].
#[no_mangle]
pub unsafe extern "C" fn cvb_state_from_json(json: *const c_char, out: *mut *mut CvbState) -> CvbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(CvbStatus::InvalidUtf8, e.to_string()))?;
        let inner = StateSpecDocument::parse(text)?.build()?;
        *out = Box::into_raw(Box::new(CvbState { inner }));
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle from [`cvb_state_from_json`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn cvb_state_free(state: *mut CvbState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of modes, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cvb_state_n_modes(state: *const CvbState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.n_modes())
}

/// Evaluates the CFRD functional. `theta` and `delta` may be null (zeros);
/// `s` holds `n` entries of +1 or -1.
///
/// # Safety
/// `state` must be a live handle, non-null arrays must hold `n` elements and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvb_evaluate(
    state: *const CvbState,
    theta: *const f64,
    delta: *const f64,
    s: *const i8,
    n: usize,
    out: *mut CvbReport,
) -> CvbStatus {
    guard(|| {
        let st = state_ref(state)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let settings = settings_from_raw(theta, delta, s, n)?;
        *out = CvbReport::from(&cfrd_evaluate(st.source(), &settings)?);
        Ok(())
    })
}

/// As [`cvb_evaluate`], additionally checking that a violation comes with a
/// negative `minor_d` and, for dense states with `pt_oracle`, a negative
/// partial transpose.
///
/// # Safety
/// Same contract as [`cvb_evaluate`].
#[no_mangle]
pub unsafe extern "C" fn cvb_verify(
    state: *const CvbState,
    theta: *const f64,
    delta: *const f64,
    s: *const i8,
    n: usize,
    pt_oracle: bool,
    out: *mut CvbVerification,
) -> CvbStatus {
    guard(|| {
        let st = state_ref(state)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let settings = settings_from_raw(theta, delta, s, n)?;
        let v = verify_implication(st.source(), &settings, pt_oracle)?;
        *out = CvbVerification {
            report: CvbReport::from(&v.report),
            has_pt_min_eig: v.pt_min_eig.is_some(),
            pt_min_eig: v.pt_min_eig.unwrap_or(f64::NAN),
            consistent: v.consistent,
        };
        Ok(())
    })
}

/// Smallest eigenvalue of the partial transpose over the modes in
/// `bipartition` (bit k is mode k). Dense states only.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cvb_partial_transpose_min_eig(
    state: *const CvbState,
    bipartition: u64,
    out: *mut f64,
) -> CvbStatus {
    guard(|| {
        let st = state_ref(state)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let State::Dense(dense) = st else {
            return Err(Failure(
                CvbStatus::InvalidArgument,
                "partial transposes need a dense state".into(),
            ));
        };
        *out = partial_transpose_min_eig(dense, ModeSet::from_mask(bipartition))?.min_eigenvalue;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn cvb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::InvalidSettings("x".into())), CvbStatus::InvalidSettings);
        assert_eq!(
            status_of(&Error::Headroom {
                mode: 0,
                needed: 2,
                available: 1
            }),
            CvbStatus::Headroom
        );
        assert_eq!(status_of(&Error::TrivialBipartition(vec![])), CvbStatus::InvalidArgument);
    }

    #[test]
    fn panics_are_contained() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, CvbStatus::Panic);
        let msg = unsafe { CStr::from_ptr(cvb_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
    }
}
