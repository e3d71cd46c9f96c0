//! C ABI for the braid-action engine.
//!
//! Handles are opaque pointers owned by this library; every function
//! returns a status code and writes results through out-pointers. Strings
//! and word buffers handed out must be released with the matching free
//! functions. All functions are panic-safe: a caught panic reports
//! `WPL_STATUS_INTERNAL` instead of unwinding across the boundary.

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wpl_braid::error::Error;
use wpl_braid::invariants::{helix_check, invariant_determinant, FunctionalSet};
use wpl_braid::io::{LatticeDump, SequenceFile};
use wpl_braid::ktheory::{EulerLattice, K0Class};
use wpl_braid::mutation::{apply_word, BraidWord};
use wpl_braid::orbit::{find_braid_word, SearchBudget, Strategy};
use wpl_braid::sequences::{canonical_sequence, det2_sequence, validate_sequence, ExcSeq};
use wpl_braid::tilting::sgd_lower_bound;
use wpl_braid::weights::WeightType;

/// Status codes returned by every fallible function.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WplStatus {
    Ok = 0,
    NullPointer = 1,
    BadInput = 2,
    Mismatch = 3,
    Overflow = 4,
    ModelInconsistency = 5,
    BudgetExhausted = 6,
    Internal = 7,
}

/// Opaque Euler lattice handle.
pub struct WplLattice {
    lat: EulerLattice,
}

/// Opaque exceptional-sequence handle.
pub struct WplSeq {
    seq: ExcSeq,
}

fn status_of(e: &Error) -> WplStatus {
    match e {
        Error::MalformedInput(_) => WplStatus::BadInput,
        Error::WeightMismatch
        | Error::DimensionMismatch { .. }
        | Error::ArmOutOfRange { .. }
        | Error::SlotOutOfRange { .. } => WplStatus::Mismatch,
        Error::Overflow => WplStatus::Overflow,
        Error::ModelInconsistency(_) => WplStatus::ModelInconsistency,
        Error::SearchExhausted { .. } => WplStatus::BudgetExhausted,
    }
}

fn guarded(f: impl FnOnce() -> WplStatus + std::panic::UnwindSafe) -> WplStatus {
    catch_unwind(f).unwrap_or(WplStatus::Internal)
}

/// Builds the Euler lattice of a weight sequence (`weights` may be null
/// when `len` is 0, giving the weightless type).
///
/// # Safety
/// `weights` must point to `len` readable values; `out` must be a valid
/// pointer. The returned handle must be released with
/// [`wpl_lattice_free`].
#[no_mangle]
pub unsafe extern "C" fn wpl_lattice_new(
    weights: *const i64,
    len: usize,
    out: *mut *mut WplLattice,
) -> WplStatus {
    if out.is_null() || (weights.is_null() && len > 0) {
        return WplStatus::NullPointer;
    }
    let ws: Vec<i64> = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(weights, len).to_vec()
    };
    guarded(AssertUnwindSafe(move || {
        match WeightType::new(ws).and_then(EulerLattice::new) {
            Ok(lat) => {
                *out = Box::into_raw(Box::new(WplLattice { lat }));
                WplStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// # Safety
/// `lat` must be null or a handle from [`wpl_lattice_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpl_lattice_free(lat: *mut WplLattice) {
    if !lat.is_null() {
        drop(Box::from_raw(lat));
    }
}

/// Rank of the Grothendieck lattice; 0 on a null handle.
///
/// # Safety
/// `lat` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpl_lattice_rank(lat: *const WplLattice) -> usize {
    lat.as_ref().map_or(0, |l| l.lat.n())
}

/// Least common multiple of the weights; 0 on a null handle.
///
/// # Safety
/// `lat` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpl_lattice_lcm(lat: *const WplLattice) -> i64 {
    lat.as_ref().map_or(0, |l| l.lat.p())
}

/// Twice the genus.
///
/// # Safety
/// `lat` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpl_lattice_genus2(lat: *const WplLattice) -> i64 {
    lat.as_ref().map_or(0, |l| l.lat.genus2())
}

/// JSON dump of the lattice (weights, Gram matrix, degrees, translate
/// matrix, genus). Free the string with [`wpl_string_free`].
///
/// # Safety
/// `lat` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpl_lattice_to_json(
    lat: *const WplLattice,
    out: *mut *mut c_char,
) -> WplStatus {
    let Some(l) = lat.as_ref() else {
        return WplStatus::NullPointer;
    };
    if out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let dump = LatticeDump::from_lattice(&l.lat);
        match serde_json::to_string(&dump).ok().and_then(|s| CString::new(s).ok()) {
            Some(s) => {
                *out = s.into_raw();
                WplStatus::Ok
            }
            None => WplStatus::Internal,
        }
    }))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The canonical exceptional sequence.
///
/// # Safety
/// `lat` must be a live handle; `out` valid. Free with [`wpl_seq_free`].
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_canonical(
    lat: *const WplLattice,
    out: *mut *mut WplSeq,
) -> WplStatus {
    let Some(l) = lat.as_ref() else {
        return WplStatus::NullPointer;
    };
    if out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let seq = canonical_sequence(&l.lat);
        *out = Box::into_raw(Box::new(WplSeq { seq }));
        WplStatus::Ok
    }))
}

/// The determinant-normalizing sequence `(O, O(c), tube simples)`.
///
/// # Safety
/// `lat` must be a live handle; `out` valid. Free with [`wpl_seq_free`].
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_det2(
    lat: *const WplLattice,
    out: *mut *mut WplSeq,
) -> WplStatus {
    let Some(l) = lat.as_ref() else {
        return WplStatus::NullPointer;
    };
    if out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| match det2_sequence(&l.lat) {
        Ok(seq) => {
            *out = Box::into_raw(Box::new(WplSeq { seq }));
            WplStatus::Ok
        }
        Err(e) => status_of(&e),
    }))
}

/// Builds a sequence from `count` rows of coefficients, one row per class,
/// each of length `wpl_lattice_rank(lat)`, row-major.
///
/// # Safety
/// `coeffs` must hold `count * wpl_lattice_rank(lat)` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_from_classes(
    lat: *const WplLattice,
    coeffs: *const i64,
    count: usize,
    out: *mut *mut WplSeq,
) -> WplStatus {
    let Some(l) = lat.as_ref() else {
        return WplStatus::NullPointer;
    };
    if coeffs.is_null() || out.is_null() {
        return WplStatus::NullPointer;
    }
    let n = l.lat.n();
    let flat = std::slice::from_raw_parts(coeffs, count * n);
    guarded(AssertUnwindSafe(|| {
        let entries: Vec<K0Class> = flat
            .chunks(n)
            .map(|c| K0Class { coeffs: c.to_vec() })
            .collect();
        if entries.len() < 2 {
            return WplStatus::BadInput;
        }
        *out = Box::into_raw(Box::new(WplSeq {
            seq: ExcSeq::new(entries),
        }));
        WplStatus::Ok
    }))
}

/// # Safety
/// `seq` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_free(seq: *mut WplSeq) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Number of entries; 0 on a null handle.
///
/// # Safety
/// `seq` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_len(seq: *const WplSeq) -> usize {
    seq.as_ref().map_or(0, |s| s.seq.len())
}

/// Copies the coefficients of entry `index` into `buf`.
///
/// # Safety
/// `buf` must hold at least `buf_len` writable values.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_entry(
    seq: *const WplSeq,
    index: usize,
    buf: *mut i64,
    buf_len: usize,
) -> WplStatus {
    let Some(s) = seq.as_ref() else {
        return WplStatus::NullPointer;
    };
    if buf.is_null() {
        return WplStatus::NullPointer;
    }
    if index >= s.seq.len() || buf_len < s.seq.entries[index].len() {
        return WplStatus::BadInput;
    }
    let coeffs = &s.seq.entries[index].coeffs;
    std::slice::from_raw_parts_mut(buf, coeffs.len()).copy_from_slice(coeffs);
    WplStatus::Ok
}

/// Sequence as JSON `{ "weights": ..., "classes": ... }`; free with
/// [`wpl_string_free`].
///
/// # Safety
/// `lat` and `seq` must be live handles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_to_json(
    lat: *const WplLattice,
    seq: *const WplSeq,
    out: *mut *mut c_char,
) -> WplStatus {
    let (Some(l), Some(s)) = (lat.as_ref(), seq.as_ref()) else {
        return WplStatus::NullPointer;
    };
    if out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let file = SequenceFile::from_seq(&l.lat, &s.seq);
        match serde_json::to_string(&file).ok().and_then(|t| CString::new(t).ok()) {
            Some(t) => {
                *out = t.into_raw();
                WplStatus::Ok
            }
            None => WplStatus::Internal,
        }
    }))
}

/// Validity of the sequence: writes 1 or 0 to `ok_out`. A sequence that
/// fails validation is still `WPL_STATUS_OK` at the call level.
///
/// # Safety
/// `lat` and `seq` must be live handles; `ok_out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_is_valid(
    lat: *const WplLattice,
    seq: *const WplSeq,
    ok_out: *mut i32,
) -> WplStatus {
    let (Some(l), Some(s)) = (lat.as_ref(), seq.as_ref()) else {
        return WplStatus::NullPointer;
    };
    if ok_out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        match validate_sequence(&l.lat, &s.seq) {
            Ok(report) => {
                *ok_out = i32::from(report.ok);
                WplStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// Applies a braid word (signed 1-based slots) and hands back the new
/// sequence.
///
/// # Safety
/// `letters` must hold `len` values; handles live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_seq_apply_word(
    lat: *const WplLattice,
    seq: *const WplSeq,
    letters: *const i32,
    len: usize,
    out: *mut *mut WplSeq,
) -> WplStatus {
    let (Some(l), Some(s)) = (lat.as_ref(), seq.as_ref()) else {
        return WplStatus::NullPointer;
    };
    if (letters.is_null() && len > 0) || out.is_null() {
        return WplStatus::NullPointer;
    }
    let word = BraidWord::new(if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(letters, len).to_vec()
    });
    guarded(AssertUnwindSafe(|| match apply_word(&l.lat, &s.seq, &word) {
        Ok(seq) => {
            *out = Box::into_raw(Box::new(WplSeq { seq }));
            WplStatus::Ok
        }
        Err(e) => status_of(&e),
    }))
}

/// Determinant of the default functional matrix (rank, degree, tube
/// pairings); its absolute value is the weight lcm on every full sequence
/// in the mutation orbit.
///
/// # Safety
/// Handles live; `det_out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_invariant_determinant(
    lat: *const WplLattice,
    seq: *const WplSeq,
    det_out: *mut i64,
) -> WplStatus {
    let (Some(l), Some(s)) = (lat.as_ref(), seq.as_ref()) else {
        return WplStatus::NullPointer;
    };
    if det_out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let r = FunctionalSet::default_set(&l.lat)
            .and_then(|fs| invariant_determinant(&l.lat, &s.seq, &fs));
        match r {
            Ok(d) => {
                *det_out = d;
                WplStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// Checks both helix rotation identities; writes 1 or 0.
///
/// # Safety
/// Handles live; `pass_out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_helix_check(
    lat: *const WplLattice,
    seq: *const WplSeq,
    pass_out: *mut i32,
) -> WplStatus {
    let (Some(l), Some(s)) = (lat.as_ref(), seq.as_ref()) else {
        return WplStatus::NullPointer;
    };
    if pass_out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| match helix_check(&l.lat, &s.seq) {
        Ok(r) => {
            *pass_out = i32::from(r.pass);
            WplStatus::Ok
        }
        Err(e) => status_of(&e),
    }))
}

/// Search strategies for [`wpl_connect`].
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WplStrategy {
    Recursive = 0,
    Bidirectional = 1,
}

/// Searches for a braid word carrying `src` to `dst`. On success writes a
/// letter buffer (free with [`wpl_word_free`]) and its length; when the
/// budget runs out returns `WPL_STATUS_BUDGET_EXHAUSTED` with
/// `found_out = 0`. A returned word always re-applies exactly.
///
/// # Safety
/// Handles live; out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_connect(
    lat: *const WplLattice,
    src: *const WplSeq,
    dst: *const WplSeq,
    strategy: WplStrategy,
    max_nodes: u64,
    found_out: *mut i32,
    word_out: *mut *mut i32,
    word_len_out: *mut usize,
    nodes_out: *mut u64,
) -> WplStatus {
    let (Some(l), Some(a), Some(b)) = (lat.as_ref(), src.as_ref(), dst.as_ref()) else {
        return WplStatus::NullPointer;
    };
    if found_out.is_null() || word_out.is_null() || word_len_out.is_null() || nodes_out.is_null()
    {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let budget = SearchBudget::with_max_nodes(max_nodes);
        let strat = match strategy {
            WplStrategy::Recursive => Strategy::Recursive,
            WplStrategy::Bidirectional => Strategy::Bidirectional,
        };
        match find_braid_word(&l.lat, &a.seq, &b.seq, strat, &budget) {
            Ok(report) => {
                *found_out = i32::from(report.found);
                *nodes_out = report.nodes;
                match report.word {
                    Some(word) => {
                        let mut letters = word.letters.into_boxed_slice();
                        *word_len_out = letters.len();
                        *word_out = letters.as_mut_ptr();
                        std::mem::forget(letters);
                        WplStatus::Ok
                    }
                    None => {
                        *word_out = ptr::null_mut();
                        *word_len_out = 0;
                        WplStatus::BudgetExhausted
                    }
                }
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// # Safety
/// `word` must be a buffer of length `len` returned by [`wpl_connect`],
/// not yet freed (null is ignored).
#[no_mangle]
pub unsafe extern "C" fn wpl_word_free(word: *mut i32, len: usize) {
    if !word.is_null() {
        drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(word, len)));
    }
}

/// Certified lower bound for the strongest global dimension by bounded
/// orbit search.
///
/// # Safety
/// `lat` live; `bound_out` valid.
#[no_mangle]
pub unsafe extern "C" fn wpl_sgd_lower_bound(
    lat: *const WplLattice,
    max_nodes: u64,
    bound_out: *mut i64,
) -> WplStatus {
    let Some(l) = lat.as_ref() else {
        return WplStatus::NullPointer;
    };
    if bound_out.is_null() {
        return WplStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| match sgd_lower_bound(&l.lat, max_nodes, None) {
        Ok(r) => {
            *bound_out = r.lower_bound;
            WplStatus::Ok
        }
        Err(e) => status_of(&e),
    }))
}
