//! C ABI over the `pqbc` toolkit.
//!
//! Every fallible function returns a [`PqbcStatus`] and writes its result
//! through an out-pointer. On failure the message of the most recent error on
//! the calling thread is available from [`pqbc_last_error_message`].
//! Ciphers are opaque handles created with [`pqbc_cipher_new`] and released
//! with [`pqbc_cipher_free`].

use pqbc::bounds::{
    bound_fx_pq, bound_lrw_pq_general, bound_lrw_pq_hybrid, bound_mode, bound_xex2_pq, bound_xex2_pq_table,
    AdvantageBound, BoundQuery, ModeId,
};
use pqbc::cipher::{CipherFamily, CipherParams, IdealCipher};
use pqbc::constructions::{
    fx_dec, fx_enc, lrw_dec, lrw_enc, xex2_dec, xex2_enc, FxKey, LrwKey, MultiplicativeHash, TweakXex, Xex2Key,
};
use pqbc::experiments::{
    run_distinguishing, verify_hybrids, ConstructionId, DistinguisherId, ExperimentConfig, HybridConstruction,
    HybridParams,
};
use pqbc::gf2n::FieldSpec;
use pqbc::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes. The numeric values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqbcStatus {
    Ok = 0,
    NullPointer = 1,
    ParamsOutOfRange = 2,
    WidthMismatch = 3,
    ZeroInverse = 4,
    ReducibleModulus = 5,
    RepeatedQuery = 6,
    TweakOutOfSpace = 7,
    PromiseViolated = 8,
    EmptyMessage = 9,
    PartialBlock = 10,
    TagMismatch = 11,
    NonceWidth = 12,
    NoCollisionFound = 13,
    RecoveryFailed = 14,
    NoKey = 15,
    AmbiguousKey = 16,
    RegimeError = 17,
    MissingParameter = 18,
    BudgetExceeded = 19,
    IdentityViolation = 20,
    UnknownEnum = 21,
    Panic = 22,
}

impl From<&Error> for PqbcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::ParamsOutOfRange(_) => PqbcStatus::ParamsOutOfRange,
            Error::WidthMismatch { .. } => PqbcStatus::WidthMismatch,
            Error::ZeroInverse => PqbcStatus::ZeroInverse,
            Error::ReducibleModulus(_) => PqbcStatus::ReducibleModulus,
            Error::RepeatedQuery(_) => PqbcStatus::RepeatedQuery,
            Error::TweakOutOfSpace(_) => PqbcStatus::TweakOutOfSpace,
            Error::PromiseViolated(_) => PqbcStatus::PromiseViolated,
            Error::EmptyMessage => PqbcStatus::EmptyMessage,
            Error::PartialBlock => PqbcStatus::PartialBlock,
            Error::TagMismatch => PqbcStatus::TagMismatch,
            Error::NonceWidth(_) => PqbcStatus::NonceWidth,
            Error::NoCollisionFound => PqbcStatus::NoCollisionFound,
            Error::RecoveryFailed(_) => PqbcStatus::RecoveryFailed,
            Error::NoKey => PqbcStatus::NoKey,
            Error::AmbiguousKey(_) => PqbcStatus::AmbiguousKey,
            Error::RegimeError(_) => PqbcStatus::RegimeError,
            Error::MissingParameter(_) => PqbcStatus::MissingParameter,
            Error::BudgetExceeded(_) => PqbcStatus::BudgetExceeded,
            Error::IdentityViolation(_) => PqbcStatus::IdentityViolation,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend(msg.bytes().filter(|&b| b != 0));
    });
}

enum Fail {
    Lib(Error),
    Null,
    Enum(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PqbcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PqbcStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(&e.to_string());
            PqbcStatus::from(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_last_error("a required pointer argument was null");
            PqbcStatus::NullPointer
        }
        Ok(Err(Fail::Enum(what))) => {
            set_last_error(&format!("unknown {what} value"));
            PqbcStatus::UnknownEnum
        }
        Err(_) => {
            set_last_error("internal panic");
            PqbcStatus::Panic
        }
    }
}

fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    // SAFETY: non-null and, per the documented contract, valid for writes.
    unsafe { out.write(v) };
    Ok(())
}

fn cipher<'a>(c: *const PqbcCipher) -> Result<&'a IdealCipher, Fail> {
    // SAFETY: the caller passes a live handle from `pqbc_cipher_new` or null.
    unsafe { c.as_ref() }.map(|c| &c.inner).ok_or(Fail::Null)
}

fn check_block<C: CipherFamily>(c: &C, k: u64, v: u64) -> Result<(), Fail> {
    for (value, bits) in [(k, c.key_bits()), (v, c.block_bits())] {
        if value >> bits != 0 {
            return Err(Error::WidthMismatch { value, bits }.into());
        }
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pqbc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator, so a caller can size a second call.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            // SAFETY: `buf` holds at least `len > n` bytes.
            unsafe {
                std::ptr::copy_nonoverlapping(e.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        e.len()
    })
}

/// An ideal cipher with `m`-bit keys and `n`-bit blocks, fixed by a seed.
pub struct PqbcCipher {
    inner: IdealCipher,
}

/// Creates an ideal cipher (`1 ≤ n ≤ 20`, `m ≤ 24`) and stores the handle in
/// `*out`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_cipher_new(m: u32, n: u32, seed: u64, out: *mut *mut PqbcCipher) -> PqbcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null);
        }
        let inner = IdealCipher::new(CipherParams::new(m, n, seed))?;
        write(out, Box::into_raw(Box::new(PqbcCipher { inner })))
    })
}

/// Releases a cipher. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle from [`pqbc_cipher_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pqbc_cipher_free(c: *mut PqbcCipher) {
    if !c.is_null() {
        // SAFETY: ownership returns from the caller per the contract above.
        drop(unsafe { Box::from_raw(c) });
    }
}

/// `E_k(x)`.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_cipher_encrypt(c: *const PqbcCipher, k: u64, x: u64, out: *mut u64) -> PqbcStatus {
    guard(|| {
        let e = cipher(c)?;
        write(out, e.forward(k, x)?)
    })
}

/// `E_k^{-1}(y)`.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_cipher_decrypt(c: *const PqbcCipher, k: u64, y: u64, out: *mut u64) -> PqbcStatus {
    guard(|| {
        let e = cipher(c)?;
        write(out, e.inverse(k, y)?)
    })
}

/// `FX(x) = E_{k0}(x ⊕ k1) ⊕ k2`, or its inverse when `decrypt` is set.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_fx(
    c: *const PqbcCipher,
    k0: u64,
    k1: u64,
    k2: u64,
    x: u64,
    decrypt: bool,
    out: *mut u64,
) -> PqbcStatus {
    guard(|| {
        let e = cipher(c)?;
        check_block(e, k0, k1)?;
        check_block(e, 0, k2)?;
        let key = FxKey::new(k0, k1, k2);
        write(out, if decrypt { fx_dec(e, &key, x)? } else { fx_enc(e, &key, x)? })
    })
}

/// LRW with the multiplicative hash `h_{k'}(τ) = k'·τ` over the canonical
/// field of the cipher's block width. `tweak` must be nonzero.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_lrw(
    c: *const PqbcCipher,
    k: u64,
    k_prime: u64,
    tweak: u64,
    x: u64,
    decrypt: bool,
    out: *mut u64,
) -> PqbcStatus {
    guard(|| {
        let e = cipher(c)?;
        let hash = MultiplicativeHash::new(FieldSpec::canonical(e.block_bits())?);
        let key = LrwKey { k, k_prime };
        write(out, if decrypt { lrw_dec(e, &hash, &key, tweak, x)? } else { lrw_enc(e, &hash, &key, tweak, x)? })
    })
}

/// XEX2 with offset `α^j·E_{k'}(i)` over the canonical field.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_xex2(
    c: *const PqbcCipher,
    k: u64,
    k_prime: u64,
    alpha: u64,
    i: u64,
    j: u64,
    x: u64,
    decrypt: bool,
    out: *mut u64,
) -> PqbcStatus {
    guard(|| {
        let e = cipher(c)?;
        let field = FieldSpec::canonical(e.block_bits())?;
        let key = Xex2Key::new(k, k_prime, alpha)?;
        let t = TweakXex::new(i, j)?;
        write(out, if decrypt { xex2_dec(e, &field, &key, t, x)? } else { xex2_enc(e, &field, &key, t, x)? })
    })
}

/// `a·b` in the canonical field GF(2^n).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_gf_mul(n: u32, a: u64, b: u64, out: *mut u64) -> PqbcStatus {
    guard(|| {
        let f = FieldSpec::canonical(n)?;
        let a = f.element(a)?;
        let b = f.element(b)?;
        write(out, f.mul(a, b))
    })
}

/// `a^{-1}` in the canonical field GF(2^n).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_gf_inv(n: u32, a: u64, out: *mut u64) -> PqbcStatus {
    guard(|| {
        let f = FieldSpec::canonical(n)?;
        write(out, f.inv(a)?)
    })
}

/// Which advantage bound [`pqbc_bound`] evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqbcFormula {
    FxPq = 0,
    LrwHybrid = 1,
    LrwGeneral = 2,
    Xex2Pq = 3,
    Xex2Table = 4,
    ModeCbc = 5,
    ModeEcbc = 6,
    ModeCmac = 7,
    ModeGcm = 8,
    ModeGcmSst = 9,
}

pub const PQBC_HAS_ELL: u32 = 1;
pub const PQBC_HAS_SIGMA: u32 = 2;
pub const PQBC_HAS_QC_DEC: u32 = 4;
pub const PQBC_HAS_TAG_BITS: u32 = 8;

/// Bound inputs. Optional fields are read only when their `PQBC_HAS_*` bit
/// is set in `has`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PqbcBoundQuery {
    pub m: u32,
    pub n: u32,
    pub q_c: f64,
    pub q_q: f64,
    pub ell: f64,
    pub sigma: f64,
    pub q_c_dec: f64,
    pub tag_bits: u32,
    pub has: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PqbcBound {
    /// Unclamped sum of the terms.
    pub value: f64,
    /// `min(value, 1)`.
    pub clamped: f64,
    pub vacuous: bool,
    pub term_count: u32,
    /// The first four term values; unused slots are zero.
    pub terms: [f64; 4],
}

impl From<&AdvantageBound> for PqbcBound {
    fn from(b: &AdvantageBound) -> Self {
        let mut terms = [0.0; 4];
        for (slot, t) in terms.iter_mut().zip(&b.terms) {
            *slot = t.value;
        }
        Self { value: b.value, clamped: b.clamped, vacuous: b.vacuous, term_count: b.terms.len() as u32, terms }
    }
}

fn formula(raw: u32) -> Option<PqbcFormula> {
    use PqbcFormula::*;
    [FxPq, LrwHybrid, LrwGeneral, Xex2Pq, Xex2Table, ModeCbc, ModeEcbc, ModeCmac, ModeGcm, ModeGcmSst]
        .into_iter()
        .find(|f| *f as u32 == raw)
}

/// Evaluates `formula` (a [`PqbcFormula`] value) at `q`.
///
/// # Safety
/// `q` must be valid for reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_bound(formula_id: u32, q: *const PqbcBoundQuery, out: *mut PqbcBound) -> PqbcStatus {
    guard(|| {
        // SAFETY: null or valid per the contract.
        let q = *unsafe { q.as_ref() }.ok_or(Fail::Null)?;
        let f = formula(formula_id).ok_or(Fail::Enum("formula"))?;
        let mut bq = BoundQuery::new(q.m, q.n, q.q_c, q.q_q);
        bq.ell = (q.has & PQBC_HAS_ELL != 0).then_some(q.ell);
        bq.sigma = (q.has & PQBC_HAS_SIGMA != 0).then_some(q.sigma);
        bq.q_c_dec = (q.has & PQBC_HAS_QC_DEC != 0).then_some(q.q_c_dec);
        bq.s = (q.has & PQBC_HAS_TAG_BITS != 0).then_some(q.tag_bits);
        let b = match f {
            PqbcFormula::FxPq => bound_fx_pq(&bq)?,
            PqbcFormula::LrwHybrid => bound_lrw_pq_hybrid(&bq)?,
            PqbcFormula::LrwGeneral => bound_lrw_pq_general(&bq)?,
            PqbcFormula::Xex2Pq => bound_xex2_pq(&bq)?,
            PqbcFormula::Xex2Table => bound_xex2_pq_table(&bq)?,
            PqbcFormula::ModeCbc => bound_mode(ModeId::Cbc, &bq)?,
            PqbcFormula::ModeEcbc => bound_mode(ModeId::Ecbc, &bq)?,
            PqbcFormula::ModeCmac => bound_mode(ModeId::Cmac, &bq)?,
            PqbcFormula::ModeGcm => bound_mode(ModeId::Gcm, &bq)?,
            PqbcFormula::ModeGcmSst => bound_mode(ModeId::GcmSst, &bq)?,
        };
        write(out, PqbcBound::from(&b))
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqbcConstruction {
    Fx = 0,
    Lrw = 1,
    Xex2 = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqbcDistinguisher {
    ConstantOne = 0,
    ConstantZero = 1,
    Birthday = 2,
    EvenMansour = 3,
    KeyGuess = 4,
}

/// Distinguishing experiment parameters. `construction` and `distinguisher`
/// take [`PqbcConstruction`] and [`PqbcDistinguisher`] values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PqbcExperimentConfig {
    pub construction: u32,
    pub distinguisher: u32,
    pub m: u32,
    pub n: u32,
    pub trials: u64,
    pub seed: u64,
    pub q_c: u64,
    pub q_q: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PqbcExperimentResult {
    pub p_real: f64,
    pub p_ideal: f64,
    pub advantage: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The construction's default bound at the configured budgets.
    pub bound: f64,
    pub bound_vacuous: bool,
}

fn construction(raw: u32) -> Option<ConstructionId> {
    [ConstructionId::Fx, ConstructionId::Lrw, ConstructionId::Xex2].get(raw as usize).copied()
}

fn distinguisher(raw: u32) -> Option<DistinguisherId> {
    use DistinguisherId::*;
    [ConstantOne, ConstantZero, Birthday, EvenMansour, KeyGuess].get(raw as usize).copied()
}

/// Runs a real-vs-ideal distinguishing experiment.
///
/// # Safety
/// `cfg` must be valid for reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_run_distinguishing(
    cfg: *const PqbcExperimentConfig,
    out: *mut PqbcExperimentResult,
) -> PqbcStatus {
    guard(|| {
        // SAFETY: null or valid per the contract.
        let c = *unsafe { cfg.as_ref() }.ok_or(Fail::Null)?;
        let con = construction(c.construction).ok_or(Fail::Enum("construction"))?;
        let dis = distinguisher(c.distinguisher).ok_or(Fail::Enum("distinguisher"))?;
        let config = ExperimentConfig::new(con, dis, c.m, c.n)
            .with_budgets(c.q_c, c.q_q)
            .with_trials(c.trials)
            .with_seed(c.seed);
        let r = run_distinguishing(&config)?;
        write(
            out,
            PqbcExperimentResult {
                p_real: r.p_real,
                p_ideal: r.p_ideal,
                advantage: r.advantage,
                ci_low: r.ci[0],
                ci_high: r.ci[1],
                bound: r.bound,
                bound_vacuous: r.bound_vacuous,
            },
        )
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PqbcHybridSummary {
    pub instances: u64,
    pub bad_instances: u64,
    pub pointwise_checks: u64,
    pub table_comparisons: u64,
    pub forward_p_value: f64,
    pub inverse_p_value: f64,
}

/// Checks the hybrid identities on `count` random instances (`lrw` selects
/// LRW, otherwise FX). Returns `IdentityViolation` on the first
/// counterexample, with the instance in the error message.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pqbc_verify_hybrids(
    lrw: bool,
    m: u32,
    n: u32,
    j_max: u32,
    count: u32,
    seed: u64,
    out: *mut PqbcHybridSummary,
) -> PqbcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null);
        }
        let c = if lrw { HybridConstruction::Lrw } else { HybridConstruction::Fx };
        let r = verify_hybrids(&HybridParams::new(c, m, n, j_max as usize, count as usize).with_seed(seed))?;
        write(
            out,
            PqbcHybridSummary {
                instances: r.instances as u64,
                bad_instances: r.bad_instances as u64,
                pointwise_checks: r.pointwise_checks as u64,
                table_comparisons: r.table_comparisons as u64,
                forward_p_value: r.forward_law.p_value,
                inverse_p_value: r.inverse_law.p_value,
            },
        )
    })
}
