//! Small-domain ideal ciphers and the swap algebra built on top of them.
//!
//! An [`IdealCipher`] is a seeded family of independent random permutations of
//! `{0,1}^n`, one per key in `{0,1}^m`, materialized lazily. A
//! [`ModifiedCipher`] rewires one key's permutation with a chain of point swaps
//! so that it agrees with a transcript of construction queries, and a
//! [`ResampledCipher`] precomposes one key's permutation with a single swap.

use crate::error::{check_width, Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

/// Largest block width whose tables are materialized.
pub const MAX_BLOCK_BITS: u32 = 20;
/// Largest key width of an [`IdealCipher`].
pub const MAX_KEY_BITS: u32 = 24;

/// Cached table entries (both directions) kept before the cache is flushed.
/// Tables are a pure function of `(seed, key)`, so flushing never changes any
/// answer; it only costs a regeneration.
const CACHE_ENTRY_BUDGET: usize = 1 << 24;

/// Deterministic 64-bit mixing of two words (SplitMix64 finalizer applied to a
/// keyed combination). Used for every seed derivation in the crate.
pub fn mix(a: u64, b: u64) -> u64 {
    fn fmix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    fmix(a.wrapping_add(0x9E37_79B9_7F4A_7C15) ^ fmix(b.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

/// A fresh ChaCha8 stream for a derived seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn block_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The point swap: exchanges `a` and `b` and leaves every other point alone.
#[inline]
pub fn swap_apply(a: u64, b: u64, x: u64) -> u64 {
    if x == a {
        b
    } else if x == b {
        a
    } else {
        x
    }
}

/// A permutation of `{0,1}^n` stored with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    n: u32,
    fwd: Vec<u32>,
    inv: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: u32) -> Result<Self> {
        check_block_bits(n)?;
        let fwd: Vec<u32> = (0..1u32 << n).collect();
        Ok(Self { n, inv: fwd.clone(), fwd })
    }

    /// Wraps a forward table, checking that it is a bijection of `{0,1}^n`.
    pub fn from_forward(n: u32, fwd: Vec<u32>) -> Result<Self> {
        check_block_bits(n)?;
        let size = 1usize << n;
        if fwd.len() != size {
            return Err(Error::ParamsOutOfRange(format!("table has {} entries, expected {size}", fwd.len())));
        }
        let mut inv = vec![u32::MAX; size];
        for (x, &y) in fwd.iter().enumerate() {
            let slot = inv
                .get_mut(y as usize)
                .ok_or(Error::WidthMismatch { value: y as u64, bits: n })?;
            if *slot != u32::MAX {
                return Err(Error::ParamsOutOfRange(format!("table maps two points to {y:#x}")));
            }
            *slot = x as u32;
        }
        Ok(Self { n, fwd, inv })
    }

    /// Fisher-Yates shuffle driven by a ChaCha8 stream seeded with `seed`.
    pub fn shuffled(n: u32, seed: u64) -> Result<Self> {
        check_block_bits(n)?;
        let fwd = shuffled_table(n, seed);
        let mut inv = vec![0u32; fwd.len()];
        for (x, &y) in fwd.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Ok(Self { n, fwd, inv })
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        self.fwd[x as usize] as u64
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        self.inv[y as usize] as u64
    }

    pub fn forward_table(&self) -> &[u32] {
        &self.fwd
    }

    pub fn inverse_table(&self) -> &[u32] {
        &self.inv
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { n: self.n, fwd: self.inv.clone(), inv: self.fwd.clone() }
    }
}

fn check_block_bits(n: u32) -> Result<()> {
    if (1..=MAX_BLOCK_BITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::ParamsOutOfRange(format!("block width n={n} must be in 1..={MAX_BLOCK_BITS}")))
    }
}

/// Forward table of the permutation for a derived seed, without the inverse.
/// Exhaustive key search uses this to avoid caching thousands of tables.
pub fn shuffled_table(n: u32, seed: u64) -> Vec<u32> {
    let mut table: Vec<u32> = (0..1u32 << n).collect();
    table.shuffle(&mut rng_for(seed));
    table
}

/// A lazily materialized family of independent permutations indexed by an
/// arbitrary 64-bit label.
#[derive(Debug)]
pub struct PermutationFamily {
    n: u32,
    seed: u64,
    tables: RwLock<HashMap<u64, Arc<Permutation>>>,
    cached_entries: AtomicUsize,
}

impl PermutationFamily {
    pub fn new(n: u32, seed: u64) -> Result<Self> {
        check_block_bits(n)?;
        Ok(Self { n, seed, tables: RwLock::new(HashMap::new()), cached_entries: AtomicUsize::new(0) })
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Seed of the stream that shuffles the permutation with label `label`.
    pub fn label_seed(&self, label: u64) -> u64 {
        mix(self.seed, label)
    }

    /// The permutation for `label`, materializing and caching it on first use.
    pub fn get(&self, label: u64) -> Arc<Permutation> {
        if let Some(t) = self.tables.read().expect("table cache poisoned").get(&label) {
            return Arc::clone(t);
        }
        let mut tables = self.tables.write().expect("table cache poisoned");
        if let Some(t) = tables.get(&label) {
            return Arc::clone(t);
        }
        let perm = Arc::new(
            Permutation::shuffled(self.n, self.label_seed(label)).expect("width validated at construction"),
        );
        let entries = 2usize << self.n;
        if self.cached_entries.load(Ordering::Relaxed) + entries > CACHE_ENTRY_BUDGET {
            tables.clear();
            self.cached_entries.store(0, Ordering::Relaxed);
        }
        self.cached_entries.fetch_add(entries, Ordering::Relaxed);
        tables.insert(label, Arc::clone(&perm));
        perm
    }

    /// The forward table for `label`, generated without touching the cache.
    pub fn uncached_forward(&self, label: u64) -> Vec<u32> {
        shuffled_table(self.n, self.label_seed(label))
    }

    #[inline]
    pub fn apply(&self, label: u64, x: u64) -> u64 {
        if let Some(t) = self.tables.read().expect("table cache poisoned").get(&label) {
            return t.apply(x);
        }
        self.get(label).apply(x)
    }

    #[inline]
    pub fn invert(&self, label: u64, y: u64) -> u64 {
        if let Some(t) = self.tables.read().expect("table cache poisoned").get(&label) {
            return t.invert(y);
        }
        self.get(label).invert(y)
    }

    pub fn materialized(&self) -> usize {
        self.tables.read().expect("table cache poisoned").len()
    }
}

/// Parameters of an ideal cipher `E: {0,1}^m × {0,1}^n → {0,1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CipherParams {
    pub m: u32,
    pub n: u32,
    pub seed: u64,
}

impl CipherParams {
    pub fn new(m: u32, n: u32, seed: u64) -> Self {
        Self { m, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        check_block_bits(self.n)?;
        if !(1..=MAX_KEY_BITS).contains(&self.m) {
            return Err(Error::ParamsOutOfRange(format!("key width m={} must be in 1..={MAX_KEY_BITS}", self.m)));
        }
        Ok(())
    }
}

/// Keyed family of permutations with forward and inverse access.
///
/// The methods take already-validated inputs; the checked entry points live on
/// the concrete types.
pub trait CipherFamily: Sync {
    fn key_bits(&self) -> u32;
    fn block_bits(&self) -> u32;
    fn enc(&self, k: u64, x: u64) -> u64;
    fn dec(&self, k: u64, y: u64) -> u64;
}

impl<C: CipherFamily + ?Sized> CipherFamily for &C {
    fn key_bits(&self) -> u32 {
        (**self).key_bits()
    }
    fn block_bits(&self) -> u32 {
        (**self).block_bits()
    }
    fn enc(&self, k: u64, x: u64) -> u64 {
        (**self).enc(k, x)
    }
    fn dec(&self, k: u64, y: u64) -> u64 {
        (**self).dec(k, y)
    }
}

/// An ideal cipher: each key indexes an independent uniformly random
/// permutation, shuffled from a stream seeded with `mix(seed, key)`.
#[derive(Debug)]
pub struct IdealCipher {
    params: CipherParams,
    family: PermutationFamily,
    queries: AtomicU64,
}

impl IdealCipher {
    pub fn new(params: CipherParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, family: PermutationFamily::new(params.n, params.seed)?, queries: AtomicU64::new(0) })
    }

    pub fn params(&self) -> CipherParams {
        self.params
    }

    /// Checked forward query `E_k(x)`; counts one query.
    pub fn forward(&self, k: u64, x: u64) -> Result<u64> {
        check_width(k, self.params.m)?;
        check_width(x, self.params.n)?;
        Ok(self.enc(k, x))
    }

    /// Checked inverse query `E_k^{-1}(y)`; counts one query.
    pub fn inverse(&self, k: u64, y: u64) -> Result<u64> {
        check_width(k, self.params.m)?;
        check_width(y, self.params.n)?;
        Ok(self.dec(k, y))
    }

    /// The full permutation for key `k`. Does not count as a query.
    pub fn table(&self, k: u64) -> Arc<Permutation> {
        self.family.get(k)
    }

    /// Forward table for `k` generated outside the cache. Does not count.
    pub fn uncached_forward(&self, k: u64) -> Vec<u32> {
        self.family.uncached_forward(k)
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub fn materialized_keys(&self) -> usize {
        self.family.materialized()
    }
}

impl CipherFamily for IdealCipher {
    fn key_bits(&self) -> u32 {
        self.params.m
    }
    fn block_bits(&self) -> u32 {
        self.params.n
    }
    fn enc(&self, k: u64, x: u64) -> u64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.family.apply(k, x)
    }
    fn dec(&self, k: u64, y: u64) -> u64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.family.invert(k, y)
    }
}

/// `E(m, n)` sampling: a fresh ideal cipher.
pub fn ideal_cipher_new(params: CipherParams) -> Result<IdealCipher> {
    IdealCipher::new(params)
}

/// A cipher given by explicit tables, one per key. Keys without a table act as
/// the identity. Handy for stubs and for known-answer vectors.
#[derive(Debug, Clone)]
pub struct TableCipher {
    m: u32,
    n: u32,
    tables: HashMap<u64, Permutation>,
}

impl TableCipher {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        check_block_bits(n)?;
        Ok(Self { m, n, tables: HashMap::new() })
    }

    pub fn with_table(mut self, k: u64, perm: Permutation) -> Result<Self> {
        if perm.block_bits() != self.n {
            return Err(Error::ParamsOutOfRange("table width differs from cipher width".into()));
        }
        check_width(k, self.m)?;
        self.tables.insert(k, perm);
        Ok(self)
    }
}

impl CipherFamily for TableCipher {
    fn key_bits(&self) -> u32 {
        self.m
    }
    fn block_bits(&self) -> u32 {
        self.n
    }
    fn enc(&self, k: u64, x: u64) -> u64 {
        self.tables.get(&k).map_or(x, |t| t.apply(x))
    }
    fn dec(&self, k: u64, y: u64) -> u64 {
        self.tables.get(&k).map_or(y, |t| t.invert(y))
    }
}

/// One classical construction query `(τ, x, y)`; FX-style transcripts leave
/// the tweak empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Entry {
    pub tweak: Option<u64>,
    pub x: u64,
    pub y: u64,
}

/// An ordered list of construction queries with no repeated query point:
/// `(τ, x)` pairs are distinct and `(τ, y)` pairs are distinct.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Transcript {
    entries: Vec<Entry>,
    #[serde(skip)]
    inputs: HashSet<(Option<u64>, u64)>,
    #[serde(skip)]
    outputs: HashSet<(Option<u64>, u64)>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = Entry>) -> Result<Self> {
        let mut t = Self::new();
        for e in entries {
            t.push(e)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, e: Entry) -> Result<()> {
        let idx = self.entries.len();
        if self.inputs.contains(&(e.tweak, e.x)) || self.outputs.contains(&(e.tweak, e.y)) {
            return Err(Error::RepeatedQuery(idx));
        }
        self.inputs.insert((e.tweak, e.x));
        self.outputs.insert((e.tweak, e.y));
        self.entries.push(e);
        Ok(())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prefix(&self, j: usize) -> Transcript {
        Transcript::from_entries(self.entries[..j].iter().copied()).expect("prefix of a valid transcript")
    }

    pub fn contains_input(&self, tweak: Option<u64>, x: u64) -> bool {
        self.inputs.contains(&(tweak, x))
    }

    pub fn contains_output(&self, tweak: Option<u64>, y: u64) -> bool {
        self.outputs.contains(&(tweak, y))
    }
}

type MaskFn = Arc<dyn Fn(Option<u64>) -> u64 + Send + Sync>;

/// Input/output masks applied to each transcript entry, and the key whose
/// permutation gets rewired.
///
/// The FX rule uses `u_i = k1`, `v_i = k2`; the LRW rule uses
/// `u_i = v_i = h_{k'}(τ_i)`.
#[derive(Clone)]
pub struct OffsetRule {
    target_key: u64,
    kind: RuleKind,
}

#[derive(Clone)]
enum RuleKind {
    Fx { k1: u64, k2: u64 },
    Tweaked(MaskFn),
}

impl std::fmt::Debug for OffsetRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            RuleKind::Fx { k1, k2 } => {
                write!(f, "OffsetRule::Fx {{ k0: {:#x}, k1: {k1:#x}, k2: {k2:#x} }}", self.target_key)
            }
            RuleKind::Tweaked(_) => write!(f, "OffsetRule::Tweaked {{ k: {:#x} }}", self.target_key),
        }
    }
}

impl OffsetRule {
    pub fn fx(k0: u64, k1: u64, k2: u64) -> Self {
        Self { target_key: k0, kind: RuleKind::Fx { k1, k2 } }
    }

    /// LRW-style rule: both masks equal `hash(τ)`. Entries without a tweak are
    /// masked with `hash` applied to `None`.
    pub fn tweaked(k: u64, hash: impl Fn(Option<u64>) -> u64 + Send + Sync + 'static) -> Self {
        Self { target_key: k, kind: RuleKind::Tweaked(Arc::new(hash)) }
    }

    pub fn target_key(&self) -> u64 {
        self.target_key
    }

    /// `(u, v)` for an entry carrying `tweak`.
    pub fn offsets(&self, tweak: Option<u64>) -> (u64, u64) {
        match &self.kind {
            RuleKind::Fx { k1, k2 } => (*k1, *k2),
            RuleKind::Tweaked(h) => {
                let m = h(tweak);
                (m, m)
            }
        }
    }
}

/// `E^{T_j,K}`: the base cipher with the target key's permutation rewired by
/// `swap(E^{T_{i-1}}(x_i ⊕ u_i), y_i ⊕ v_i) ∘ E^{T_{i-1}}` for `i = 1..=j`.
///
/// Each swap step changes at most two points of the forward table, so the
/// whole chain is stored as a flat override map per direction.
#[derive(Debug)]
pub struct ModifiedCipher<C> {
    base: C,
    rule: OffsetRule,
    fwd: HashMap<u64, u64>,
    inv: HashMap<u64, u64>,
    steps: usize,
}

impl<C: CipherFamily> ModifiedCipher<C> {
    pub fn build(base: C, rule: OffsetRule, transcript: &Transcript) -> Result<Self> {
        let n = base.block_bits();
        check_width(rule.target_key, base.key_bits())?;
        let mut mc = Self { base, rule, fwd: HashMap::new(), inv: HashMap::new(), steps: 0 };
        for e in transcript.entries() {
            check_width(e.x, n)?;
            check_width(e.y, n)?;
            mc.push_swap(e);
        }
        Ok(mc)
    }

    fn push_swap(&mut self, e: &Entry) {
        let k = self.rule.target_key;
        let (u, v) = self.rule.offsets(e.tweak);
        let pa = e.x ^ u;
        let a = self.enc(k, pa);
        let b = e.y ^ v;
        self.steps += 1;
        if a == b {
            return;
        }
        let pb = self.dec(k, b);
        self.fwd.insert(pa, b);
        self.fwd.insert(pb, a);
        self.inv.insert(b, pa);
        self.inv.insert(a, pb);
    }

    pub fn rule(&self) -> &OffsetRule {
        &self.rule
    }

    pub fn base(&self) -> &C {
        &self.base
    }

    /// Number of transcript entries folded in.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of points whose forward value differs from the base cipher's
    /// (at most `2j`).
    pub fn overrides(&self) -> usize {
        self.fwd.len()
    }
}

impl<C: CipherFamily> CipherFamily for ModifiedCipher<C> {
    fn key_bits(&self) -> u32 {
        self.base.key_bits()
    }
    fn block_bits(&self) -> u32 {
        self.base.block_bits()
    }
    fn enc(&self, k: u64, x: u64) -> u64 {
        if k == self.rule.target_key {
            if let Some(&y) = self.fwd.get(&x) {
                return y;
            }
        }
        self.base.enc(k, x)
    }
    fn dec(&self, k: u64, y: u64) -> u64 {
        if k == self.rule.target_key {
            if let Some(&x) = self.inv.get(&y) {
                return x;
            }
        }
        self.base.dec(k, y)
    }
}

pub fn modified_build<C: CipherFamily>(base: C, rule: OffsetRule, transcript: &Transcript) -> Result<ModifiedCipher<C>> {
    ModifiedCipher::build(base, rule, transcript)
}

/// `E^{(1)}`: the key-`k0` permutation becomes `E_{k0} ∘ swap(s0, s1)`; every
/// other key is untouched.
#[derive(Debug, Clone)]
pub struct ResampledCipher<C> {
    base: C,
    k0: u64,
    s0: u64,
    s1: u64,
}

impl<C: CipherFamily> ResampledCipher<C> {
    pub fn new(base: C, k0: u64, s0: u64, s1: u64) -> Self {
        Self { base, k0, s0, s1 }
    }

    pub fn swap_points(&self) -> (u64, u64, u64) {
        (self.k0, self.s0, self.s1)
    }
}

impl<C: CipherFamily> CipherFamily for ResampledCipher<C> {
    fn key_bits(&self) -> u32 {
        self.base.key_bits()
    }
    fn block_bits(&self) -> u32 {
        self.base.block_bits()
    }
    fn enc(&self, k: u64, x: u64) -> u64 {
        if k == self.k0 {
            self.base.enc(k, swap_apply(self.s0, self.s1, x))
        } else {
            self.base.enc(k, x)
        }
    }
    fn dec(&self, k: u64, y: u64) -> u64 {
        if k == self.k0 {
            swap_apply(self.s0, self.s1, self.base.dec(k, y))
        } else {
            self.base.dec(k, y)
        }
    }
}

pub fn resample_swap<C: CipherFamily>(base: C, k0: u64, s0: u64, s1: u64) -> ResampledCipher<C> {
    ResampledCipher::new(base, k0, s0, s1)
}

/// Full forward table of one key of any cipher family.
pub fn forward_table<C: CipherFamily + ?Sized>(c: &C, k: u64) -> Vec<u64> {
    (0..1u64 << c.block_bits()).map(|x| c.enc(k, x)).collect()
}

/// Full inverse table of one key of any cipher family.
pub fn inverse_table<C: CipherFamily + ?Sized>(c: &C, k: u64) -> Vec<u64> {
    (0..1u64 << c.block_bits()).map(|y| c.dec(k, y)).collect()
}

/// True when key `k` of `c` is a bijection whose inverse is consistent.
pub fn is_bijection<C: CipherFamily + ?Sized>(c: &C, k: u64) -> bool {
    let size = 1usize << c.block_bits();
    let mut seen = vec![false; size];
    for x in 0..size as u64 {
        let y = c.enc(k, x);
        if y as usize >= size || seen[y as usize] || c.dec(k, y) != x {
            return false;
        }
        seen[y as usize] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cipher(m: u32, n: u32, seed: u64) -> IdealCipher {
        IdealCipher::new(CipherParams::new(m, n, seed)).unwrap()
    }

    #[test]
    fn params_range() {
        assert!(IdealCipher::new(CipherParams::new(8, 21, 0)).is_err());
        assert!(IdealCipher::new(CipherParams::new(25, 8, 0)).is_err());
        assert!(IdealCipher::new(CipherParams::new(0, 8, 0)).is_err());
        assert!(IdealCipher::new(CipherParams::new(24, 20, 0)).is_ok());
    }

    #[test]
    fn deterministic_tables() {
        let a = cipher(8, 8, 42);
        let b = cipher(8, 8, 42);
        for k in [0, 1, 200] {
            assert_eq!(a.table(k).forward_table(), b.table(k).forward_table());
        }
        assert_ne!(cipher(8, 8, 1).table(0).forward_table(), cipher(8, 8, 2).table(0).forward_table());
    }

    #[test]
    fn tables_are_bijections_and_round_trip() {
        let e = cipher(4, 8, 7);
        for k in 0..16 {
            assert!(is_bijection(&e, k));
        }
        let e6 = cipher(4, 6, 9);
        for x in 0..64 {
            let y = e6.forward(3, x).unwrap();
            assert_eq!(e6.inverse(3, y).unwrap(), x);
        }
    }

    #[test]
    fn query_counter_counts_each_call() {
        let e = cipher(4, 6, 1);
        e.forward(1, 2).unwrap();
        e.inverse(1, 2).unwrap();
        assert_eq!(e.queries(), 2);
        e.table(1);
        assert_eq!(e.queries(), 2);
        e.reset_queries();
        assert_eq!(e.queries(), 0);
    }

    #[test]
    fn width_mismatch() {
        let e = cipher(4, 6, 1);
        assert!(matches!(e.forward(16, 0), Err(Error::WidthMismatch { .. })));
        assert!(matches!(e.forward(0, 64), Err(Error::WidthMismatch { .. })));
        assert!(matches!(e.inverse(0, 64), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn swap_basics() {
        for x in 0..256 {
            assert_eq!(swap_apply(5, 5, x), x);
            assert_eq!(swap_apply(3, 9, swap_apply(3, 9, x)), x);
        }
        assert_eq!(swap_apply(3, 9, 3), 9);
        assert_eq!(swap_apply(3, 9, 9), 3);
    }

    #[test]
    fn transcript_rejects_repeats() {
        let mut t = Transcript::new();
        t.push(Entry { tweak: None, x: 1, y: 2 }).unwrap();
        assert_eq!(t.push(Entry { tweak: None, x: 1, y: 3 }), Err(Error::RepeatedQuery(1)));
        assert_eq!(t.push(Entry { tweak: None, x: 4, y: 2 }), Err(Error::RepeatedQuery(1)));
        // Same point under another tweak is a different query.
        t.push(Entry { tweak: Some(1), x: 1, y: 2 }).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn empty_transcript_is_base_cipher() {
        let e = cipher(4, 6, 3);
        let mc = ModifiedCipher::build(&e, OffsetRule::fx(2, 5, 9), &Transcript::new()).unwrap();
        for k in 0..16 {
            assert_eq!(forward_table(&mc, k), forward_table(&e, k));
        }
    }

    #[test]
    fn single_entry_is_programmed() {
        let e = cipher(4, 6, 3);
        let (k0, k1, k2) = (2, 5, 9);
        let t = Transcript::from_entries([Entry { tweak: None, x: 17, y: 40 }]).unwrap();
        let mc = ModifiedCipher::build(&e, OffsetRule::fx(k0, k1, k2), &t).unwrap();
        assert_eq!(mc.enc(k0, 17 ^ k1) ^ k2, 40);
        assert!(is_bijection(&mc, k0));
        assert!(mc.overrides() <= 2);
    }

    #[test]
    fn resample_swaps_one_key() {
        let e = cipher(4, 6, 11);
        let r = resample_swap(&e, 3, 10, 20);
        assert_eq!(r.enc(3, 10), e.enc(3, 20));
        assert_eq!(r.enc(3, 20), e.enc(3, 10));
        for k in (0..16).filter(|&k| k != 3) {
            assert_eq!(forward_table(&r, k), forward_table(&e, k));
        }
        assert!(is_bijection(&r, 3));
        let same = resample_swap(&e, 3, 10, 10);
        assert_eq!(forward_table(&same, 3), forward_table(&e, 3));
    }

    #[test]
    fn cache_flush_preserves_answers() {
        let e = cipher(12, 16, 5);
        let first = e.table(7).apply(1234);
        // Touch enough keys to force at least one flush.
        for k in 0..300 {
            e.table(k);
        }
        assert_eq!(e.table(7).apply(1234), first);
        assert_eq!(e.uncached_forward(7)[1234] as u64, first);
    }
}
