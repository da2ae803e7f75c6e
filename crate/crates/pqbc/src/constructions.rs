//! Keyed constructions over an ideal cipher: FX, the α-reflection variant
//! FX̃, LRW with a pluggable hash family, XEX2 (two-key, single-key and
//! ideal-hash) and the unique-search wrapper `E′`.

use crate::cipher::{CipherFamily, Permutation, PermutationFamily};
use crate::error::{check_width, Error, Result};
use crate::gf2n::FieldSpec;
use serde::Serialize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// Largest XEX2 block-index exponent `j`.
pub const XEX2_MAX_J: u64 = (1 << 20) - 1;

/// `K = (k0, k1, k2)`: cipher key and the two whitening keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FxKey {
    pub k0: u64,
    pub k1: u64,
    pub k2: u64,
}

impl FxKey {
    pub fn new(k0: u64, k1: u64, k2: u64) -> Self {
        Self { k0, k1, k2 }
    }

    fn check<C: CipherFamily + ?Sized>(&self, e: &C) -> Result<()> {
        check_width(self.k0, e.key_bits())?;
        check_width(self.k1, e.block_bits())?;
        check_width(self.k2, e.block_bits())?;
        Ok(())
    }
}

/// `FX_K(x) = E_{k0}(x ⊕ k1) ⊕ k2`.
pub fn fx_enc<C: CipherFamily + ?Sized>(e: &C, key: &FxKey, x: u64) -> Result<u64> {
    key.check(e)?;
    check_width(x, e.block_bits())?;
    Ok(e.enc(key.k0, x ^ key.k1) ^ key.k2)
}

pub fn fx_dec<C: CipherFamily + ?Sized>(e: &C, key: &FxKey, y: u64) -> Result<u64> {
    key.check(e)?;
    check_width(y, e.block_bits())?;
    Ok(e.dec(key.k0, y ^ key.k2) ^ key.k1)
}

/// Reflection constant α: the top key bit. The subspace `H` is the set of keys
/// with that bit clear.
pub fn fx_tilde_alpha(m: u32) -> u64 {
    1u64 << (m - 1)
}

fn in_h(m: u32, k0: u64) -> bool {
    k0 & fx_tilde_alpha(m) == 0
}

/// `FX̃_K = FX_K` when `k0 ∈ H`, else `FX^{-1}_{(k0⊕α, k1, k2)}`.
pub fn fx_tilde_enc<C: CipherFamily + ?Sized>(e: &C, key: &FxKey, x: u64) -> Result<u64> {
    let m = e.key_bits();
    if in_h(m, key.k0) {
        fx_enc(e, key, x)
    } else {
        fx_dec(e, &FxKey { k0: key.k0 ^ fx_tilde_alpha(m), ..*key }, x)
    }
}

pub fn fx_tilde_dec<C: CipherFamily + ?Sized>(e: &C, key: &FxKey, y: u64) -> Result<u64> {
    let m = e.key_bits();
    if in_h(m, key.k0) {
        fx_dec(e, key, y)
    } else {
        fx_enc(e, &FxKey { k0: key.k0 ^ fx_tilde_alpha(m), ..*key }, y)
    }
}

/// A keyed hash family `h_{k'}(τ)` producing n-bit masks.
pub trait HashFamily: Send + Sync {
    fn hash(&self, k_prime: u64, tweak: u64) -> Result<u64>;
}

/// `h_{k'}(τ) = k'·τ` in GF(2^n). The default tweak space is the nonzero
/// n-bit strings, since `h(0) = 0` for every key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiplicativeHash {
    field: FieldSpec,
    allow_zero_tweak: bool,
}

impl MultiplicativeHash {
    pub fn new(field: FieldSpec) -> Self {
        Self { field, allow_zero_tweak: false }
    }

    /// Admits τ = 0, whose mask is always 0.
    pub fn allowing_zero_tweak(mut self) -> Self {
        self.allow_zero_tweak = true;
        self
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
}

impl HashFamily for MultiplicativeHash {
    fn hash(&self, k_prime: u64, tweak: u64) -> Result<u64> {
        self.field.element(k_prime)?;
        if self.field.element(tweak).is_err() || (tweak == 0 && !self.allow_zero_tweak) {
            return Err(Error::TweakOutOfSpace(tweak));
        }
        Ok(self.field.hash_mul(k_prime, tweak))
    }
}

/// The constant-zero family. LRW over it collapses to the bare cipher.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroHash;

impl HashFamily for ZeroHash {
    fn hash(&self, _k_prime: u64, _tweak: u64) -> Result<u64> {
        Ok(0)
    }
}

/// XEX2 tweak `(i, j)`: sector value and block index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TweakXex {
    pub i: u64,
    pub j: u64,
}

impl TweakXex {
    pub fn new(i: u64, j: u64) -> Result<Self> {
        if j > XEX2_MAX_J {
            return Err(Error::TweakOutOfSpace(j));
        }
        if i >> 32 != 0 {
            return Err(Error::TweakOutOfSpace(i));
        }
        Ok(Self { i, j })
    }

    /// Packs `(i, j)` into one 64-bit tweak code: `i | j << 32`.
    pub fn code(&self) -> u64 {
        self.i | (self.j << 32)
    }

    pub fn from_code(code: u64) -> Result<Self> {
        Self::new(code & 0xFFFF_FFFF, code >> 32)
    }
}

/// `h(i, j) = α^j · π(i)` where `π` is either `E_{k'}` (XEX2) or an
/// independent permutation (ideal-hash XEX2). Tweaks are [`TweakXex`] codes.
pub struct Xex2HashFamily<'a, C: ?Sized> {
    field: FieldSpec,
    alpha: u64,
    source: Xex2Source<'a, C>,
}

enum Xex2Source<'a, C: ?Sized> {
    Cipher(&'a C),
    Ideal(&'a Permutation),
}

impl<'a, C: CipherFamily + ?Sized> Xex2HashFamily<'a, C> {
    /// `π = E_{k'}` for the hash key `k'` supplied at evaluation.
    pub fn with_cipher(field: FieldSpec, alpha: u64, e: &'a C) -> Result<Self> {
        check_alpha(&field, alpha)?;
        Ok(Self { field, alpha, source: Xex2Source::Cipher(e) })
    }
}

impl<'a> Xex2HashFamily<'a, crate::cipher::TableCipher> {
    /// A fixed permutation `π`; the hash key is ignored.
    pub fn with_permutation(field: FieldSpec, alpha: u64, pi: &'a Permutation) -> Result<Self> {
        check_alpha(&field, alpha)?;
        if pi.block_bits() != field.n() {
            return Err(Error::ParamsOutOfRange("permutation width differs from field width".into()));
        }
        Ok(Self { field, alpha, source: Xex2Source::Ideal(pi) })
    }
}

fn check_alpha(field: &FieldSpec, alpha: u64) -> Result<()> {
    field.element(alpha)?;
    if alpha == 0 {
        return Err(Error::ParamsOutOfRange("alpha must be nonzero".into()));
    }
    Ok(())
}

impl<C: CipherFamily + ?Sized> HashFamily for Xex2HashFamily<'_, C> {
    fn hash(&self, k_prime: u64, tweak: u64) -> Result<u64> {
        let t = TweakXex::from_code(tweak)?;
        self.field.element(t.i).map_err(|_| Error::TweakOutOfSpace(tweak))?;
        let base = match &self.source {
            Xex2Source::Cipher(e) => {
                check_width(k_prime, e.key_bits())?;
                e.enc(k_prime, t.i)
            }
            Xex2Source::Ideal(pi) => pi.apply(t.i),
        };
        Ok(self.field.mul(self.field.pow(self.alpha, t.j), base))
    }
}

/// `(k, k')`: cipher key and hash key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LrwKey {
    pub k: u64,
    pub k_prime: u64,
}

/// `LRW(τ, x) = E_k(x ⊕ h_{k'}(τ)) ⊕ h_{k'}(τ)`.
pub fn lrw_enc<C: CipherFamily + ?Sized, H: HashFamily + ?Sized>(
    e: &C,
    h: &H,
    key: &LrwKey,
    tweak: u64,
    x: u64,
) -> Result<u64> {
    check_width(key.k, e.key_bits())?;
    check_width(x, e.block_bits())?;
    let mask = h.hash(key.k_prime, tweak)?;
    Ok(e.enc(key.k, x ^ mask) ^ mask)
}

pub fn lrw_dec<C: CipherFamily + ?Sized, H: HashFamily + ?Sized>(
    e: &C,
    h: &H,
    key: &LrwKey,
    tweak: u64,
    y: u64,
) -> Result<u64> {
    check_width(key.k, e.key_bits())?;
    check_width(y, e.block_bits())?;
    let mask = h.hash(key.k_prime, tweak)?;
    Ok(e.dec(key.k, y ^ mask) ^ mask)
}

/// XEX2 keys. The single-key variant has `k = k'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Xex2Key {
    pub k: u64,
    pub k_prime: u64,
    pub alpha: u64,
}

impl Xex2Key {
    pub fn new(k: u64, k_prime: u64, alpha: u64) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::ParamsOutOfRange("alpha must be nonzero".into()));
        }
        Ok(Self { k, k_prime, alpha })
    }

    pub fn single(k: u64, alpha: u64) -> Result<Self> {
        Self::new(k, k, alpha)
    }

    pub fn is_single_key(&self) -> bool {
        self.k == self.k_prime
    }
}

/// `Δ = α^j · E_{k'}(i)`.
pub fn xex2_offset<C: CipherFamily + ?Sized>(e: &C, field: &FieldSpec, key: &Xex2Key, t: TweakXex) -> Result<u64> {
    check_width(key.k_prime, e.key_bits())?;
    check_width(t.i, e.block_bits()).map_err(|_| Error::TweakOutOfSpace(t.i))?;
    if t.j > XEX2_MAX_J {
        return Err(Error::TweakOutOfSpace(t.j));
    }
    Ok(field.mul(field.pow(key.alpha, t.j), e.enc(key.k_prime, t.i)))
}

/// `XEX2(i, j, x) = E_k(x ⊕ Δ) ⊕ Δ`.
pub fn xex2_enc<C: CipherFamily + ?Sized>(e: &C, field: &FieldSpec, key: &Xex2Key, t: TweakXex, x: u64) -> Result<u64> {
    check_width(key.k, e.key_bits())?;
    check_width(x, e.block_bits())?;
    let d = xex2_offset(e, field, key, t)?;
    Ok(e.enc(key.k, x ^ d) ^ d)
}

pub fn xex2_dec<C: CipherFamily + ?Sized>(e: &C, field: &FieldSpec, key: &Xex2Key, t: TweakXex, y: u64) -> Result<u64> {
    check_width(key.k, e.key_bits())?;
    check_width(y, e.block_bits())?;
    let d = xex2_offset(e, field, key, t)?;
    Ok(e.dec(key.k, y ^ d) ^ d)
}

/// XEX2 with `E_{k'}` replaced by an independent permutation `π`.
pub fn xex2_ideal_hash_enc<C: CipherFamily + ?Sized>(
    e: &C,
    k: u64,
    pi: &Permutation,
    field: &FieldSpec,
    alpha: u64,
    t: TweakXex,
    x: u64,
) -> Result<u64> {
    check_width(k, e.key_bits())?;
    check_width(x, e.block_bits())?;
    check_width(t.i, pi.block_bits()).map_err(|_| Error::TweakOutOfSpace(t.i))?;
    let d = field.mul(field.pow(alpha, t.j), pi.apply(t.i));
    Ok(e.enc(k, x ^ d) ^ d)
}

pub fn xex2_ideal_hash_dec<C: CipherFamily + ?Sized>(
    e: &C,
    k: u64,
    pi: &Permutation,
    field: &FieldSpec,
    alpha: u64,
    t: TweakXex,
    y: u64,
) -> Result<u64> {
    check_width(k, e.key_bits())?;
    check_width(y, e.block_bits())?;
    check_width(t.i, pi.block_bits()).map_err(|_| Error::TweakOutOfSpace(t.i))?;
    let d = field.mul(field.pow(alpha, t.j), pi.apply(t.i));
    Ok(e.dec(k, y ^ d) ^ d)
}

/// `E′(k, τ) = P(τ)` if `f(k) = 1`, else `E(k, τ)`.
///
/// The unique-search promise (at most one marked key) is checked lazily: the
/// first time a second marked key is observed, queries fail with
/// [`Error::PromiseViolated`].
pub struct UniqueSearchCipher<'a, C: ?Sized, F> {
    base: &'a C,
    marked: F,
    p: Permutation,
    seen: Mutex<Option<u64>>,
}

impl<'a, C: CipherFamily + ?Sized, F: Fn(u64) -> bool> UniqueSearchCipher<'a, C, F> {
    pub fn new(base: &'a C, marked: F, p: Permutation) -> Result<Self> {
        if p.block_bits() != base.block_bits() {
            return Err(Error::ParamsOutOfRange("P must act on the cipher's block space".into()));
        }
        Ok(Self { base, marked, p, seen: Mutex::new(None) })
    }

    fn observe(&self, k: u64) -> Result<bool> {
        if !(self.marked)(k) {
            return Ok(false);
        }
        let mut seen = self.seen.lock().expect("promise tracker poisoned");
        match *seen {
            Some(prev) if prev != k => {
                Err(Error::PromiseViolated(format!("keys {prev:#x} and {k:#x} are both marked")))
            }
            _ => {
                *seen = Some(k);
                Ok(true)
            }
        }
    }

    pub fn forward(&self, k: u64, tau: u64) -> Result<u64> {
        check_width(k, self.base.key_bits())?;
        check_width(tau, self.base.block_bits())?;
        Ok(if self.observe(k)? { self.p.apply(tau) } else { self.base.enc(k, tau) })
    }

    pub fn inverse(&self, k: u64, y: u64) -> Result<u64> {
        check_width(k, self.base.key_bits())?;
        check_width(y, self.base.block_bits())?;
        Ok(if self.observe(k)? { self.p.invert(y) } else { self.base.dec(k, y) })
    }

    /// Scans every key and returns the marked one, if any.
    pub fn check_promise(&self) -> Result<Option<u64>> {
        let mut found = None;
        for k in 0..1u64 << self.base.key_bits() {
            if (self.marked)(k) {
                if let Some(prev) = found {
                    return Err(Error::PromiseViolated(format!("keys {prev:#x} and {k:#x} are both marked")));
                }
                found = Some(k);
            }
        }
        Ok(found)
    }
}

pub fn unique_search_wrapper<C: CipherFamily + ?Sized, F: Fn(u64) -> bool>(
    f: F,
    p: Permutation,
    e: &C,
) -> Result<UniqueSearchCipher<'_, C, F>> {
    UniqueSearchCipher::new(e, f, p)
}

/// A tweakable block cipher seen as an oracle. Tweaks are 64-bit codes; XEX2
/// uses [`TweakXex::code`], untweaked constructions ignore the tweak.
pub trait TweakableCipher: Sync {
    fn block_bits(&self) -> u32;
    fn encrypt(&self, tweak: u64, x: u64) -> Result<u64>;
    fn decrypt(&self, tweak: u64, y: u64) -> Result<u64>;
}

impl<T: TweakableCipher + ?Sized> TweakableCipher for &T {
    fn block_bits(&self) -> u32 {
        (**self).block_bits()
    }
    fn encrypt(&self, tweak: u64, x: u64) -> Result<u64> {
        (**self).encrypt(tweak, x)
    }
    fn decrypt(&self, tweak: u64, y: u64) -> Result<u64> {
        (**self).decrypt(tweak, y)
    }
}

/// FX as an oracle (the tweak is ignored).
pub struct FxCipher<'a, C: ?Sized> {
    pub cipher: &'a C,
    pub key: FxKey,
}

impl<C: CipherFamily + ?Sized> TweakableCipher for FxCipher<'_, C> {
    fn block_bits(&self) -> u32 {
        self.cipher.block_bits()
    }
    fn encrypt(&self, _tweak: u64, x: u64) -> Result<u64> {
        fx_enc(self.cipher, &self.key, x)
    }
    fn decrypt(&self, _tweak: u64, y: u64) -> Result<u64> {
        fx_dec(self.cipher, &self.key, y)
    }
}

/// LRW as an oracle.
pub struct LrwCipher<'a, C: ?Sized, H> {
    pub cipher: &'a C,
    pub hash: H,
    pub key: LrwKey,
}

impl<C: CipherFamily + ?Sized, H: HashFamily> TweakableCipher for LrwCipher<'_, C, H> {
    fn block_bits(&self) -> u32 {
        self.cipher.block_bits()
    }
    fn encrypt(&self, tweak: u64, x: u64) -> Result<u64> {
        lrw_enc(self.cipher, &self.hash, &self.key, tweak, x)
    }
    fn decrypt(&self, tweak: u64, y: u64) -> Result<u64> {
        lrw_dec(self.cipher, &self.hash, &self.key, tweak, y)
    }
}

/// XEX2 as an oracle over [`TweakXex`] codes.
pub struct Xex2Cipher<'a, C: ?Sized> {
    pub cipher: &'a C,
    pub field: FieldSpec,
    pub key: Xex2Key,
}

impl<C: CipherFamily + ?Sized> TweakableCipher for Xex2Cipher<'_, C> {
    fn block_bits(&self) -> u32 {
        self.cipher.block_bits()
    }
    fn encrypt(&self, tweak: u64, x: u64) -> Result<u64> {
        xex2_enc(self.cipher, &self.field, &self.key, TweakXex::from_code(tweak)?, x)
    }
    fn decrypt(&self, tweak: u64, y: u64) -> Result<u64> {
        xex2_dec(self.cipher, &self.field, &self.key, TweakXex::from_code(tweak)?, y)
    }
}

/// An ideal tweakable cipher: an independent random permutation per tweak.
#[derive(Debug)]
pub struct IdealTweakable {
    family: PermutationFamily,
}

impl IdealTweakable {
    pub fn new(n: u32, seed: u64) -> Result<Self> {
        Ok(Self { family: PermutationFamily::new(n, seed)? })
    }
}

impl TweakableCipher for IdealTweakable {
    fn block_bits(&self) -> u32 {
        self.family.block_bits()
    }
    fn encrypt(&self, tweak: u64, x: u64) -> Result<u64> {
        check_width(x, self.family.block_bits())?;
        Ok(self.family.apply(tweak, x))
    }
    fn decrypt(&self, tweak: u64, y: u64) -> Result<u64> {
        check_width(y, self.family.block_bits())?;
        Ok(self.family.invert(tweak, y))
    }
}

/// Counts every query to the wrapped oracle and optionally enforces a budget.
pub struct Counted<T> {
    inner: T,
    count: AtomicU64,
    budget: Option<u64>,
}

impl<T: TweakableCipher> Counted<T> {
    pub fn new(inner: T) -> Self {
        Self { inner, count: AtomicU64::new(0), budget: None }
    }

    pub fn with_budget(inner: T, budget: u64) -> Self {
        Self { inner, count: AtomicU64::new(0), budget: Some(budget) }
    }

    pub fn queries(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }

    fn charge(&self) -> Result<()> {
        let used = self.count.fetch_add(1, Ordering::Relaxed) + 1;
        match self.budget {
            Some(b) if used > b => Err(Error::BudgetExceeded(b)),
            _ => Ok(()),
        }
    }
}

impl<T: TweakableCipher> TweakableCipher for Counted<T> {
    fn block_bits(&self) -> u32 {
        self.inner.block_bits()
    }
    fn encrypt(&self, tweak: u64, x: u64) -> Result<u64> {
        self.charge()?;
        self.inner.encrypt(tweak, x)
    }
    fn decrypt(&self, tweak: u64, y: u64) -> Result<u64> {
        self.charge()?;
        self.inner.decrypt(tweak, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{CipherParams, IdealCipher};

    fn e(m: u32, n: u32) -> IdealCipher {
        IdealCipher::new(CipherParams::new(m, n, 77)).unwrap()
    }

    #[test]
    fn fx_without_whitening_is_the_cipher() {
        let e = e(6, 6);
        let key = FxKey::new(9, 0, 0);
        for x in 0..64 {
            assert_eq!(fx_enc(&e, &key, x).unwrap(), e.enc(9, x));
        }
    }

    #[test]
    fn fx_tilde_in_h_is_fx() {
        let e = e(6, 6);
        let key = FxKey::new(0b01_0101, 3, 60);
        for x in 0..64 {
            assert_eq!(fx_tilde_enc(&e, &key, x).unwrap(), fx_enc(&e, &key, x).unwrap());
        }
    }

    #[test]
    fn multiplicative_hash_tweak_space() {
        let h = MultiplicativeHash::new(FieldSpec::canonical(8).unwrap());
        assert_eq!(h.hash(5, 0), Err(Error::TweakOutOfSpace(0)));
        assert_eq!(h.hash(5, 256), Err(Error::TweakOutOfSpace(256)));
        assert_eq!(h.allowing_zero_tweak().hash(5, 0), Ok(0));
        assert_eq!(h.hash(1, 0x33), Ok(0x33));
    }

    #[test]
    fn xex2_tweak_range() {
        assert!(TweakXex::new(0, XEX2_MAX_J).is_ok());
        assert_eq!(TweakXex::new(0, XEX2_MAX_J + 1), Err(Error::TweakOutOfSpace(XEX2_MAX_J + 1)));
        let t = TweakXex::new(17, 999).unwrap();
        assert_eq!(TweakXex::from_code(t.code()).unwrap(), t);
        assert!(Xex2Key::new(1, 2, 0).is_err());
        assert!(Xex2Key::single(3, 2).unwrap().is_single_key());
    }

    #[test]
    fn xex2_j_zero_offset_is_cipher_output() {
        let e = e(6, 6);
        let f = FieldSpec::canonical(6).unwrap();
        let key = Xex2Key::new(1, 2, 2).unwrap();
        for i in 0..64 {
            let t = TweakXex::new(i, 0).unwrap();
            assert_eq!(xex2_offset(&e, &f, &key, t).unwrap(), e.enc(2, i));
        }
    }

    #[test]
    fn unique_search_promise() {
        let e = e(4, 6);
        let p = Permutation::shuffled(6, 3).unwrap();
        let w = unique_search_wrapper(|k| k == 5 || k == 6, p, &e).unwrap();
        assert!(w.forward(5, 1).is_ok());
        assert!(matches!(w.forward(6, 1), Err(Error::PromiseViolated(_))));
        assert!(matches!(w.check_promise(), Err(Error::PromiseViolated(_))));
    }

    #[test]
    fn counted_budget() {
        let o = Counted::with_budget(IdealTweakable::new(8, 1).unwrap(), 2);
        o.encrypt(1, 1).unwrap();
        o.decrypt(1, 1).unwrap();
        assert_eq!(o.encrypt(1, 2), Err(Error::BudgetExceeded(2)));
        assert_eq!(o.queries(), 3);
    }
}
