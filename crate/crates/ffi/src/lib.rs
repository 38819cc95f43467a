//! C ABI for the halmos toolkit.
//!
//! Every function follows the same conventions:
//!
//! - handles (`HxPerm`, `HxNeighborhood`, `HxConjCert`, `HxWitness`) are
//!   opaque pointers owned by the library; release them with the
//!   matching `hx_*_free` function, which tolerates NULL;
//! - fallible calls return an [`HxStatus`] and write results through out
//!   pointers, which are left untouched on failure;
//! - rationals cross the boundary as [`HxRatio`] numerator/denominator
//!   pairs in lowest terms;
//! - strings returned through `char**` are NUL-terminated UTF-8 owned by
//!   the library; release them with [`hx_string_free`].
//!
//! The generated header lives at `include/halmos.h`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use halmos::conjugator::{build_conjugator, verify_conjugator, ConjugatorCertificate};
use halmos::perm::{
    conjugate, generate, halmos_distance, GeneratorKind, PermSystem, WeakNeighborhood,
};
use halmos::rokhlin::{ergodic_smoothing, periodic_approximation};
use halmos::splus::verify_squiggle;
use halmos::witness::{build_unbalanced_witness, verify_witness, UnbalancedWitness};
use halmos::{textio, Error, Rational};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HxStatus {
    Ok = 0,
    NullArgument,
    InvalidUtf8,
    Dimension,
    NotBijection,
    OutOfRange,
    NotErgodic,
    Divisibility,
    Height,
    CycleTypeMismatch,
    Completion,
    NotCyclic,
    Resolution,
    TargetOutside,
    Infeasible,
    IdentityBall,
    Density,
    Overlap,
    Invalid,
    Parse,
    Io,
    Panic,
}

impl From<&Error> for HxStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension { .. } => HxStatus::Dimension,
            Error::NotBijection { .. } => HxStatus::NotBijection,
            Error::OutOfRange { .. } => HxStatus::OutOfRange,
            Error::NotErgodic { .. } => HxStatus::NotErgodic,
            Error::Divisibility { .. } => HxStatus::Divisibility,
            Error::Height { .. } => HxStatus::Height,
            Error::CycleTypeMismatch => HxStatus::CycleTypeMismatch,
            Error::Completion { .. } => HxStatus::Completion,
            Error::NotCyclic => HxStatus::NotCyclic,
            Error::Resolution { .. } => HxStatus::Resolution,
            Error::TargetOutside => HxStatus::TargetOutside,
            Error::Infeasible => HxStatus::Infeasible,
            Error::IdentityBall { .. } => HxStatus::IdentityBall,
            Error::Density { .. } => HxStatus::Density,
            Error::Overlap => HxStatus::Overlap,
            Error::Invalid(_) => HxStatus::Invalid,
            Error::Parse { .. } => HxStatus::Parse,
            Error::Io(_) => HxStatus::Io,
        }
    }
}

/// An exact rational value; `den` is always positive and the pair is in
/// lowest terms.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HxRatio {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for HxRatio {
    fn from(r: Rational) -> Self {
        HxRatio {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl HxRatio {
    fn to_rational(self) -> Result<Rational, HxStatus> {
        if self.den <= 0 {
            return Err(HxStatus::Invalid);
        }
        Ok(Rational::new(self.num, self.den))
    }
}

/// Opaque permutation system handle.
pub struct HxPerm(PermSystem);
/// Opaque weak-neighborhood handle.
pub struct HxNeighborhood(WeakNeighborhood);
/// Opaque conjugator-certificate handle.
pub struct HxConjCert(ConjugatorCertificate);
/// Opaque unbalancedness-witness handle.
pub struct HxWitness(UnbalancedWitness);

/// A static description of a status code.
#[no_mangle]
pub extern "C" fn hx_status_message(status: HxStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        HxStatus::Ok => b"ok\0",
        HxStatus::NullArgument => b"a required pointer argument was NULL\0",
        HxStatus::InvalidUtf8 => b"string argument was not valid UTF-8\0",
        HxStatus::Dimension => b"atom counts differ\0",
        HxStatus::NotBijection => b"map is not a bijection\0",
        HxStatus::OutOfRange => b"atom index out of range\0",
        HxStatus::NotErgodic => b"transformation is not ergodic\0",
        HxStatus::Divisibility => b"period does not divide the atom count\0",
        HxStatus::Height => b"tower height out of range\0",
        HxStatus::CycleTypeMismatch => b"cycle types differ\0",
        HxStatus::Completion => b"constraints close a short cycle\0",
        HxStatus::NotCyclic => b"permutation is not a single cycle\0",
        HxStatus::Resolution => b"delta lies below the resolution floor\0",
        HxStatus::TargetOutside => b"target lies outside the neighborhood\0",
        HxStatus::Infeasible => b"no admissible pair fits the neighborhood\0",
        HxStatus::IdentityBall => b"conjugator misses the identity ball\0",
        HxStatus::Density => b"no shared value hits an interval\0",
        HxStatus::Overlap => b"sequences share values\0",
        HxStatus::Invalid => b"invalid argument\0",
        HxStatus::Parse => b"malformed input text\0",
        HxStatus::Io => b"io error\0",
        HxStatus::Panic => b"internal panic\0",
    };
    msg.as_ptr() as *const c_char
}

fn out_perm(out: *mut *mut HxPerm, p: PermSystem) -> HxStatus {
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(HxPerm(p))) };
    HxStatus::Ok
}

unsafe fn perm_ref<'a>(p: *const HxPerm) -> Result<&'a PermSystem, HxStatus> {
    p.as_ref().map(|h| &h.0).ok_or(HxStatus::NullArgument)
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, HxStatus> {
    if s.is_null() {
        return Err(HxStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| HxStatus::InvalidUtf8)
}

fn out_string(out: *mut *mut c_char, text: String) -> HxStatus {
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            HxStatus::Ok
        }
        Err(_) => HxStatus::Invalid,
    }
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return HxStatus::from(&e),
        }
    };
}

// ---------------------------------------------------------------------
// permutation systems
// ---------------------------------------------------------------------

/// Builds a permutation from `images[0..n]`, the image of each atom.
///
/// # Safety
/// `images` must point to `n` readable elements.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_from_images(
    images: *const usize,
    n: usize,
    out: *mut *mut HxPerm,
) -> HxStatus {
    if images.is_null() {
        return HxStatus::NullArgument;
    }
    let map = std::slice::from_raw_parts(images, n).to_vec();
    out_perm(out, try_ffi!(PermSystem::from_map(map)))
}

#[no_mangle]
pub extern "C" fn hx_perm_identity(n: usize, out: *mut *mut HxPerm) -> HxStatus {
    if n == 0 {
        return HxStatus::Invalid;
    }
    out_perm(out, PermSystem::identity(n))
}

#[no_mangle]
pub extern "C" fn hx_perm_rotation(n: usize, step: usize, out: *mut *mut HxPerm) -> HxStatus {
    out_perm(
        out,
        try_ffi!(generate(GeneratorKind::Rotation(step), n, 0)),
    )
}

#[no_mangle]
pub extern "C" fn hx_perm_random_cycle(n: usize, seed: u64, out: *mut *mut HxPerm) -> HxStatus {
    out_perm(out, try_ffi!(generate(GeneratorKind::RandomCycle, n, seed)))
}

#[no_mangle]
pub extern "C" fn hx_perm_random_permutation(
    n: usize,
    seed: u64,
    out: *mut *mut HxPerm,
) -> HxStatus {
    out_perm(
        out,
        try_ffi!(generate(GeneratorKind::RandomPermutation, n, seed)),
    )
}

#[no_mangle]
pub extern "C" fn hx_perm_m_periodic(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut HxPerm,
) -> HxStatus {
    out_perm(
        out,
        try_ffi!(generate(GeneratorKind::MPeriodic(m), n, seed)),
    )
}

/// # Safety
/// `p` must be a live handle from this library, or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_free(p: *mut HxPerm) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Atom count; 0 for NULL.
///
/// # Safety
/// `p` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_len(p: *const HxPerm) -> usize {
    p.as_ref().map_or(0, |h| h.0.n())
}

/// Copies the image vector into `buf[0..n]`.
///
/// # Safety
/// `buf` must point to at least `hx_perm_len(p)` writable elements.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_images(
    p: *const HxPerm,
    buf: *mut usize,
    buf_len: usize,
) -> HxStatus {
    let p = match perm_ref(p) {
        Ok(p) => p,
        Err(s) => return s,
    };
    if buf.is_null() {
        return HxStatus::NullArgument;
    }
    if buf_len < p.n() {
        return HxStatus::Invalid;
    }
    std::slice::from_raw_parts_mut(buf, p.n()).copy_from_slice(p.images());
    HxStatus::Ok
}

/// # Safety
/// `s` and `t` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_compose(
    s: *const HxPerm,
    t: *const HxPerm,
    out: *mut *mut HxPerm,
) -> HxStatus {
    let s = match perm_ref(s) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let t = match perm_ref(t) {
        Ok(p) => p,
        Err(e) => return e,
    };
    out_perm(out, try_ffi!(s.compose(t)))
}

/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_inverse(p: *const HxPerm, out: *mut *mut HxPerm) -> HxStatus {
    let p = match perm_ref(p) {
        Ok(p) => p,
        Err(e) => return e,
    };
    out_perm(out, p.inverse())
}

/// `h t h⁻¹`.
///
/// # Safety
/// `h` and `t` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_conjugate(
    h: *const HxPerm,
    t: *const HxPerm,
    out: *mut *mut HxPerm,
) -> HxStatus {
    let h = match perm_ref(h) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let t = match perm_ref(t) {
        Ok(p) => p,
        Err(e) => return e,
    };
    out_perm(out, try_ffi!(conjugate(h, t)))
}

/// Normalized Hamming distance between two systems, exact.
///
/// # Safety
/// `s` and `t` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_halmos_distance(
    s: *const HxPerm,
    t: *const HxPerm,
    out: *mut HxRatio,
) -> HxStatus {
    let s = match perm_ref(s) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let t = match perm_ref(t) {
        Ok(p) => p,
        Err(e) => return e,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    let d = try_ffi!(halmos_distance(s, t));
    *out = d.into();
    HxStatus::Ok
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_is_ergodic(p: *const HxPerm, out: *mut bool) -> HxStatus {
    let p = match perm_ref(p) {
        Ok(p) => p,
        Err(e) => return e,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = p.is_ergodic();
    HxStatus::Ok
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_is_m_periodic(
    p: *const HxPerm,
    m: usize,
    out: *mut bool,
) -> HxStatus {
    let p = match perm_ref(p) {
        Ok(p) => p,
        Err(e) => return e,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = p.is_m_periodic(m);
    HxStatus::Ok
}

/// The m-periodic approximation at exact distance 1/m (for m < n).
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hx_periodic_approximation(
    t: *const HxPerm,
    m: usize,
    out: *mut *mut HxPerm,
) -> HxStatus {
    let t = match perm_ref(t) {
        Ok(p) => p,
        Err(e) => return e,
    };
    out_perm(out, try_ffi!(periodic_approximation(t, m)))
}

/// Merges all cycles into a single n-cycle; writes the exact cost.
///
/// # Safety
/// `s` must be a live handle; `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_ergodic_smoothing(
    s: *const HxPerm,
    out: *mut *mut HxPerm,
    cost: *mut HxRatio,
) -> HxStatus {
    let s = match perm_ref(s) {
        Ok(p) => p,
        Err(e) => return e,
    };
    if cost.is_null() {
        return HxStatus::NullArgument;
    }
    let (smoothed, c) = ergodic_smoothing(s);
    *cost = c.into();
    out_perm(out, smoothed)
}

/// Serializes a permutation in the `perm n=<N>` text format.
///
/// # Safety
/// `p` must be a live handle; the string must be freed with
/// `hx_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_to_text(p: *const HxPerm, out: *mut *mut c_char) -> HxStatus {
    let p = match perm_ref(p) {
        Ok(p) => p,
        Err(e) => return e,
    };
    out_string(out, textio::perm_to_string(p))
}

/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hx_perm_from_text(
    text: *const c_char,
    out: *mut *mut HxPerm,
) -> HxStatus {
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(e) => return e,
    };
    out_perm(out, try_ffi!(textio::parse_perm(text)))
}

/// # Safety
/// `s` must have been returned by this library, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------
// weak neighborhoods
// ---------------------------------------------------------------------

/// Neighborhood of `center` with radius `eps` and no marker sets yet.
///
/// # Safety
/// `center` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hx_neighborhood_new(
    center: *const HxPerm,
    eps: HxRatio,
    out: *mut *mut HxNeighborhood,
) -> HxStatus {
    let center = match perm_ref(center) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let eps = match eps.to_rational() {
        Ok(r) => r,
        Err(s) => return s,
    };
    let nbhd = try_ffi!(WeakNeighborhood::new(center.clone(), vec![], eps));
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(HxNeighborhood(nbhd)));
    HxStatus::Ok
}

/// Adds a marker set; it must be disjoint from the existing ones.
///
/// # Safety
/// `nbhd` must be a live handle; `members` must point to `len` readable
/// elements.
#[no_mangle]
pub unsafe extern "C" fn hx_neighborhood_add_set(
    nbhd: *mut HxNeighborhood,
    members: *const usize,
    len: usize,
) -> HxStatus {
    let handle = match nbhd.as_mut() {
        Some(h) => h,
        None => return HxStatus::NullArgument,
    };
    if members.is_null() && len > 0 {
        return HxStatus::NullArgument;
    }
    let members = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(members, len).to_vec()
    };
    let n = handle.0.center().n();
    let set = try_ffi!(halmos::perm::AtomSet::new(n, members));
    let mut sets = handle.0.sets().to_vec();
    sets.push(set);
    handle.0 = try_ffi!(WeakNeighborhood::new(
        handle.0.center().clone(),
        sets,
        handle.0.epsilon()
    ));
    HxStatus::Ok
}

/// # Safety
/// `nbhd` and `s` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_neighborhood_contains(
    nbhd: *const HxNeighborhood,
    s: *const HxPerm,
    out: *mut bool,
) -> HxStatus {
    let nbhd = match nbhd.as_ref() {
        Some(h) => &h.0,
        None => return HxStatus::NullArgument,
    };
    let s = match perm_ref(s) {
        Ok(p) => p,
        Err(e) => return e,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = try_ffi!(nbhd.contains(s));
    HxStatus::Ok
}

/// # Safety
/// `nbhd` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_neighborhood_free(nbhd: *mut HxNeighborhood) {
    if !nbhd.is_null() {
        drop(Box::from_raw(nbhd));
    }
}

// ---------------------------------------------------------------------
// conjugator certificates
// ---------------------------------------------------------------------

/// Runs the conjugator pipeline for single n-cycles `s`, `t` and budget
/// `delta`.
///
/// # Safety
/// `s` and `t` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn hx_conjugator_build(
    s: *const HxPerm,
    t: *const HxPerm,
    delta: HxRatio,
    out: *mut *mut HxConjCert,
) -> HxStatus {
    let s = match perm_ref(s) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let t = match perm_ref(t) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let delta = match delta.to_rational() {
        Ok(r) => r,
        Err(st) => return st,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    let built = catch_unwind(AssertUnwindSafe(|| build_conjugator(s, t, delta)));
    match built {
        Ok(Ok(cert)) => {
            *out = Box::into_raw(Box::new(HxConjCert(cert)));
            HxStatus::Ok
        }
        Ok(Err(e)) => HxStatus::from(&e),
        Err(_) => HxStatus::Panic,
    }
}

/// # Safety
/// `cert` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_free(cert: *mut HxConjCert) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Writes the three recorded distances of a certificate.
///
/// # Safety
/// `cert` must be a live handle; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_distances(
    cert: *const HxConjCert,
    conj_dist: *mut HxRatio,
    id_dist: *mut HxRatio,
    input_dist: *mut HxRatio,
) -> HxStatus {
    let cert = match cert.as_ref() {
        Some(c) => &c.0,
        None => return HxStatus::NullArgument,
    };
    if conj_dist.is_null() || id_dist.is_null() || input_dist.is_null() {
        return HxStatus::NullArgument;
    }
    *conj_dist = cert.measured_conj_dist.into();
    *id_dist = cert.measured_id_dist.into();
    *input_dist = cert.input_dist.into();
    HxStatus::Ok
}

/// Displacement window of the certificate; 0 for NULL.
///
/// # Safety
/// `cert` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_window(cert: *const HxConjCert) -> usize {
    cert.as_ref().map_or(0, |c| c.0.window)
}

/// The conjugator `h` of a certificate, as a fresh handle.
///
/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_conjugator(
    cert: *const HxConjCert,
    out: *mut *mut HxPerm,
) -> HxStatus {
    let cert = match cert.as_ref() {
        Some(c) => &c.0,
        None => return HxStatus::NullArgument,
    };
    out_perm(out, cert.h.clone())
}

/// Recomputes every certified quantity; false on any mismatch or NULL.
///
/// # Safety
/// `cert` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_verify(cert: *const HxConjCert) -> bool {
    cert.as_ref().is_some_and(|c| verify_conjugator(&c.0))
}

/// # Safety
/// `cert` must be a live handle; free the string with `hx_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_to_text(
    cert: *const HxConjCert,
    out: *mut *mut c_char,
) -> HxStatus {
    let cert = match cert.as_ref() {
        Some(c) => &c.0,
        None => return HxStatus::NullArgument,
    };
    out_string(out, textio::cert_to_string(cert))
}

/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hx_conj_cert_from_text(
    text: *const c_char,
    out: *mut *mut HxConjCert,
) -> HxStatus {
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(e) => return e,
    };
    let cert = try_ffi!(textio::parse_cert(text));
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(HxConjCert(cert)));
    HxStatus::Ok
}

// ---------------------------------------------------------------------
// unbalancedness witnesses
// ---------------------------------------------------------------------

/// Runs the full witness pipeline.
///
/// # Safety
/// `t1`, `t2` and `u` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn hx_witness_build(
    t1: *const HxPerm,
    t2: *const HxPerm,
    u: *const HxNeighborhood,
    v_eps: HxRatio,
    delta: HxRatio,
    seed: u64,
    out: *mut *mut HxWitness,
) -> HxStatus {
    let t1 = match perm_ref(t1) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let t2 = match perm_ref(t2) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let u = match u.as_ref() {
        Some(h) => &h.0,
        None => return HxStatus::NullArgument,
    };
    let v_eps = match v_eps.to_rational() {
        Ok(r) => r,
        Err(s) => return s,
    };
    let delta = match delta.to_rational() {
        Ok(r) => r,
        Err(s) => return s,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    let built = catch_unwind(AssertUnwindSafe(|| {
        build_unbalanced_witness(t1, t2, u, v_eps, delta, seed)
    }));
    match built {
        Ok(Ok(w)) => {
            *out = Box::into_raw(Box::new(HxWitness(w)));
            HxStatus::Ok
        }
        Ok(Err(e)) => HxStatus::from(&e),
        Err(_) => HxStatus::Panic,
    }
}

/// # Safety
/// `w` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_witness_free(w: *mut HxWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Recomputes every invariant of the witness; false on NULL.
///
/// # Safety
/// `w` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hx_witness_verify(w: *const HxWitness) -> bool {
    w.as_ref().is_some_and(|h| verify_witness(&h.0))
}

/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_witness_final_dist(
    w: *const HxWitness,
    out: *mut HxRatio,
) -> HxStatus {
    let w = match w.as_ref() {
        Some(h) => &h.0,
        None => return HxStatus::NullArgument,
    };
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = w.final_dist.into();
    HxStatus::Ok
}

/// # Safety
/// `w` must be a live handle; free the string with `hx_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hx_witness_to_text(
    w: *const HxWitness,
    out: *mut *mut c_char,
) -> HxStatus {
    let w = match w.as_ref() {
        Some(h) => &h.0,
        None => return HxStatus::NullArgument,
    };
    out_string(out, textio::witness_to_string(w))
}

/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hx_witness_from_text(
    text: *const c_char,
    out: *mut *mut HxWitness,
) -> HxStatus {
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(e) => return e,
    };
    let w = try_ffi!(textio::parse_witness(text));
    if out.is_null() {
        return HxStatus::NullArgument;
    }
    *out = Box::into_raw(Box::new(HxWitness(w)));
    HxStatus::Ok
}

// ---------------------------------------------------------------------
// generic certificate verification
// ---------------------------------------------------------------------

/// Verifies any certificate text produced by the toolkit, detecting the
/// kind from its header line. Writes true iff the certificate is valid.
///
/// # Safety
/// `text` must be a NUL-terminated string; `valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hx_verify_text(text: *const c_char, valid: *mut bool) -> HxStatus {
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(e) => return e,
    };
    if valid.is_null() {
        return HxStatus::NullArgument;
    }
    let header = text.lines().next().unwrap_or("").trim_end();
    let ok = match header {
        textio::CERT_HEADER => verify_conjugator(&try_ffi!(textio::parse_cert(text))),
        textio::WITNESS_HEADER => verify_witness(&try_ffi!(textio::parse_witness(text))),
        textio::SQUIGGLE_HEADER => {
            let (x, y, w) = try_ffi!(textio::parse_squiggle(text));
            verify_squiggle(&x, &y, &w)
        }
        _ => return HxStatus::Parse,
    };
    *valid = ok;
    HxStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn make_cycle(n: usize, seed: u64) -> *mut HxPerm {
        let mut p = ptr::null_mut();
        assert_eq!(hx_perm_random_cycle(n, seed, &mut p), HxStatus::Ok);
        p
    }

    #[test]
    fn perm_lifecycle_and_algebra() {
        unsafe {
            let mut id = ptr::null_mut();
            assert_eq!(hx_perm_identity(4, &mut id), HxStatus::Ok);
            let mut rot = ptr::null_mut();
            assert_eq!(hx_perm_rotation(4, 1, &mut rot), HxStatus::Ok);
            assert_eq!(hx_perm_len(rot), 4);

            let mut images = [0usize; 4];
            assert_eq!(hx_perm_images(rot, images.as_mut_ptr(), 4), HxStatus::Ok);
            assert_eq!(images, [1, 2, 3, 0]);

            let mut inv = ptr::null_mut();
            assert_eq!(hx_perm_inverse(rot, &mut inv), HxStatus::Ok);
            let mut composed = ptr::null_mut();
            assert_eq!(hx_perm_compose(rot, inv, &mut composed), HxStatus::Ok);
            let mut d = HxRatio { num: 9, den: 9 };
            assert_eq!(hx_halmos_distance(composed, id, &mut d), HxStatus::Ok);
            assert_eq!(d, HxRatio { num: 0, den: 1 });

            let mut ergodic = false;
            assert_eq!(hx_perm_is_ergodic(rot, &mut ergodic), HxStatus::Ok);
            assert!(ergodic);

            for p in [id, rot, inv, composed] {
                hx_perm_free(p);
            }
        }
    }

    #[test]
    fn error_paths_surface_status_codes() {
        unsafe {
            let a = make_cycle(8, 1);
            let b = make_cycle(12, 2);
            let mut out = ptr::null_mut();
            assert_eq!(hx_perm_compose(a, b, &mut out), HxStatus::Dimension);
            assert_eq!(
                hx_perm_compose(ptr::null(), b, &mut out),
                HxStatus::NullArgument
            );

            let mut p = ptr::null_mut();
            assert_eq!(hx_perm_m_periodic(7, 3, 1, &mut p), HxStatus::Divisibility);
            let bad_map = [0usize, 0, 1];
            assert_eq!(
                hx_perm_from_images(bad_map.as_ptr(), 3, &mut p),
                HxStatus::NotBijection
            );

            // below the resolution floor
            let s = make_cycle(8, 3);
            let mut cert = ptr::null_mut();
            assert_eq!(
                hx_conjugator_build(s, a, HxRatio { num: 1, den: 100 }, &mut cert),
                HxStatus::Resolution
            );
            let msg = CStr::from_ptr(hx_status_message(HxStatus::Resolution));
            assert!(msg.to_str().unwrap().contains("resolution"));

            hx_perm_free(a);
            hx_perm_free(b);
            hx_perm_free(s);
        }
    }

    #[test]
    fn conjugator_certificate_through_ffi() {
        unsafe {
            let t = make_cycle(128, 7);
            // a nearby cycle: conjugating by a transposition of two orbit
            // neighbours keeps the displacement structure local
            let t_ref = perm_ref(t).unwrap().clone();
            let s_sys = halmos::perm::orbit_local_edit(&t_ref, 30).unwrap();
            let mut s = ptr::null_mut();
            let status = hx_perm_from_images(s_sys.images().as_ptr(), s_sys.n(), &mut s);
            assert_eq!(status, HxStatus::Ok);

            let mut cert = ptr::null_mut();
            assert_eq!(
                hx_conjugator_build(s, t, HxRatio { num: 1, den: 3 }, &mut cert),
                HxStatus::Ok
            );
            assert!(hx_conj_cert_verify(cert));
            assert!(hx_conj_cert_window(cert) >= 1);

            let mut conj = HxRatio { num: 1, den: 1 };
            let mut idd = HxRatio { num: 1, den: 1 };
            let mut input = HxRatio { num: 1, den: 1 };
            assert_eq!(
                hx_conj_cert_distances(cert, &mut conj, &mut idd, &mut input),
                HxStatus::Ok
            );
            assert!(conj.num * 3 < conj.den); // conj-dist < 1/3

            // text round trip and generic verification
            let mut text = ptr::null_mut();
            assert_eq!(hx_conj_cert_to_text(cert, &mut text), HxStatus::Ok);
            let mut back = ptr::null_mut();
            assert_eq!(hx_conj_cert_from_text(text, &mut back), HxStatus::Ok);
            assert!(hx_conj_cert_verify(back));
            let mut valid = false;
            assert_eq!(hx_verify_text(text, &mut valid), HxStatus::Ok);
            assert!(valid);

            hx_string_free(text);
            hx_conj_cert_free(cert);
            hx_conj_cert_free(back);
            hx_perm_free(s);
            hx_perm_free(t);
        }
    }

    #[test]
    fn witness_through_ffi() {
        unsafe {
            let n = 256;
            let t1 = make_cycle(n, 10);
            let t2 = make_cycle(n, 11);
            let center = make_cycle(n, 12);
            let mut u = ptr::null_mut();
            assert_eq!(
                hx_neighborhood_new(center, HxRatio { num: 1, den: 4 }, &mut u),
                HxStatus::Ok
            );
            let members: Vec<usize> = (0..32).collect();
            assert_eq!(
                hx_neighborhood_add_set(u, members.as_ptr(), members.len()),
                HxStatus::Ok
            );
            let mut inside = false;
            assert_eq!(hx_neighborhood_contains(u, center, &mut inside), HxStatus::Ok);
            assert!(inside);

            let mut w = ptr::null_mut();
            assert_eq!(
                hx_witness_build(
                    t1,
                    t2,
                    u,
                    HxRatio { num: 3, den: 10 },
                    HxRatio { num: 1, den: 5 },
                    42,
                    &mut w
                ),
                HxStatus::Ok
            );
            assert!(hx_witness_verify(w));
            let mut fd = HxRatio { num: 1, den: 1 };
            assert_eq!(hx_witness_final_dist(w, &mut fd), HxStatus::Ok);
            assert!(fd.num * 5 < fd.den * 2); // final < 2/5

            let mut text = ptr::null_mut();
            assert_eq!(hx_witness_to_text(w, &mut text), HxStatus::Ok);
            let mut valid = false;
            assert_eq!(hx_verify_text(text, &mut valid), HxStatus::Ok);
            assert!(valid);
            let mut back = ptr::null_mut();
            assert_eq!(hx_witness_from_text(text, &mut back), HxStatus::Ok);
            assert!(hx_witness_verify(back));

            hx_string_free(text);
            hx_witness_free(w);
            hx_witness_free(back);
            hx_neighborhood_free(u);
            hx_perm_free(t1);
            hx_perm_free(t2);
            hx_perm_free(center);
        }
    }
}
