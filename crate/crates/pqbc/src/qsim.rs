//! A dense statevector simulator sized for Grover search and Simon's
//! algorithm at toy widths, plus two composite key-recovery demos.
//!
//! Oracles act directly on the amplitude vector as phase flips or basis
//! permutations. Every oracle application increments a [`QueryCounter`].

use crate::attacks::{AttackReport, Recovered, Verdict};
use crate::cipher::{block_mask, mix, rng_for, CipherParams, IdealCipher};
use crate::constructions::{FxCipher, FxKey, LrwCipher, LrwKey, MultiplicativeHash, TweakableCipher};
use crate::error::{Error, Result};
use crate::gf2n::FieldSpec;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: u32 = 24;
/// Norm drift tolerated after any operation.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Oracle-unitary applications.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounter {
    pub quantum_queries: u64,
}

impl QueryCounter {
    pub fn tick(&mut self) {
        self.quantum_queries += 1;
    }

    pub fn add(&mut self, k: u64) {
        self.quantum_queries += k;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    w: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `w` qubits.
    pub fn zero(w: u32) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&w) {
            return Err(Error::ParamsOutOfRange(format!("register of {w} qubits exceeds 1..={MAX_QUBITS}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << w];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { w, amps })
    }

    /// The uniform superposition `H^{⊗w}|0⟩`.
    pub fn uniform(w: u32) -> Result<Self> {
        let mut s = Self::zero(w)?;
        let a = Complex64::new((-(w as f64) / 2.0).exp2(), 0.0);
        s.amps.iter_mut().for_each(|x| *x = a);
        Ok(s)
    }

    pub fn qubits(&self) -> u32 {
        self.w
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|x⟩ ↦ (-1)^{f(x)}|x⟩`.
    pub fn phase_oracle(&mut self, f: &dyn Fn(u64) -> bool, counter: &mut QueryCounter) {
        for (x, a) in self.amps.iter_mut().enumerate() {
            if f(x as u64) {
                *a = -*a;
            }
        }
        counter.tick();
    }

    /// Grover diffusion: inversion about the mean amplitude.
    pub fn diffusion(&mut self) {
        let mean = self.amps.iter().sum::<Complex64>() / self.amps.len() as f64;
        self.amps.iter_mut().for_each(|a| *a = mean * 2.0 - *a);
    }

    /// Walsh-Hadamard on the qubits selected by `mask`.
    pub fn hadamard(&mut self, mask: u64) {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        for bit in 0..self.w {
            if mask >> bit & 1 == 0 {
                continue;
            }
            let step = 1usize << bit;
            for i in 0..self.amps.len() {
                if i & step == 0 {
                    let (a, b) = (self.amps[i], self.amps[i | step]);
                    self.amps[i] = (a + b) * scale;
                    self.amps[i | step] = (a - b) * scale;
                }
            }
        }
    }

    /// Samples a basis state from `|amplitude|²`.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        sample_index(&self.probabilities(), rng)
    }

    pub fn check_norm(&self) -> Result<()> {
        let drift = (self.norm_sqr() - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::IdentityViolation(format!("state norm drifted by {drift:e}")));
        }
        Ok(())
    }
}

fn sample_index(p: &[f64], rng: &mut ChaCha8Rng) -> u64 {
    let total: f64 = p.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, &pi) in p.iter().enumerate() {
        if r < pi {
            return i as u64;
        }
        r -= pi;
    }
    p.iter().rposition(|&pi| pi > 0.0).unwrap_or(0) as u64
}

/// `⌊(π/4)·√(N/M)⌋` iterations for `M` marked items among `N = 2^w`.
pub fn grover_iterations(w: u32, marked: u64) -> u64 {
    let ratio = (w as f64).exp2() / marked.max(1) as f64;
    (std::f64::consts::FRAC_PI_4 * ratio.sqrt()).floor() as u64
}

/// `sin²((2t+1)θ)` with `θ = arcsin(√(M/N))`.
pub fn grover_success_probability(w: u32, marked: u64, t: u64) -> f64 {
    let theta = ((marked as f64) / (w as f64).exp2()).sqrt().asin();
    ((2 * t + 1) as f64 * theta).sin().powi(2)
}

/// The state after `t` Grover iterations for predicate `f`.
pub fn grover_state(w: u32, f: &dyn Fn(u64) -> bool, t: u64, counter: &mut QueryCounter) -> Result<StateVector> {
    let mut s = StateVector::uniform(w)?;
    for _ in 0..t {
        s.phase_oracle(f, counter);
        s.diffusion();
    }
    s.check_norm()?;
    Ok(s)
}

/// Result of a single Grover run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverRun {
    pub measured: u64,
    /// `Some(measured)` when the measured element is marked.
    pub found: Option<u64>,
    pub iterations: u64,
    /// Probability mass on marked elements before measurement.
    pub success_probability: f64,
}

/// Grover search with any number of marked elements.
pub fn grover_search(
    w: u32,
    f: &dyn Fn(u64) -> bool,
    iterations: u64,
    rng: &mut ChaCha8Rng,
    counter: &mut QueryCounter,
) -> Result<GroverRun> {
    let s = grover_state(w, f, iterations, counter)?;
    let p = s.probabilities();
    let success_probability = p.iter().enumerate().filter(|(x, _)| f(*x as u64)).map(|(_, v)| v).sum();
    let measured = sample_index(&p, rng);
    Ok(GroverRun { measured, found: f(measured).then_some(measured), iterations, success_probability })
}

/// Grover search under the unique-search promise (at most one marked
/// element), checked by scanning the domain first. Defaults to
/// `⌊(π/4)·2^{w/2}⌋` iterations.
pub fn grover_unique_search(
    f: &dyn Fn(u64) -> bool,
    w: u32,
    iterations: Option<u64>,
    rng: &mut ChaCha8Rng,
) -> Result<(Option<u64>, QueryCounter)> {
    if w > 12 {
        return Err(Error::ParamsOutOfRange(format!("unique search supports w ≤ 12, got {w}")));
    }
    let marked: Vec<u64> = (0..1u64 << w).filter(|&x| f(x)).take(2).collect();
    if marked.len() > 1 {
        return Err(Error::PromiseViolated(format!("{:#x} and {:#x} are both marked", marked[0], marked[1])));
    }
    let t = iterations.unwrap_or_else(|| grover_iterations(w, 1));
    let mut counter = QueryCounter::default();
    let run = grover_search(w, f, t, rng, &mut counter)?;
    Ok((run.found, counter))
}

/// Exact distribution of the first register after one Simon round for
/// `f: {0,1}^u → {0,1}^v`.
///
/// The state `Σ_x |x⟩|f(x)⟩` is transformed with unnormalized butterflies, so
/// every amplitude is an exact integer until the final `2^{-u}` scaling. The
/// probability of any `y` with `y·s = 1` is therefore exactly zero.
pub fn simon_distribution(f: &dyn Fn(u64) -> u64, u: u32, v: u32) -> Result<Vec<f64>> {
    if u == 0 || u + v > MAX_QUBITS {
        return Err(Error::ParamsOutOfRange(format!("Simon register u={u}, v={v} exceeds {MAX_QUBITS} qubits")));
    }
    let size = 1usize << u;
    let mut cols: HashMap<u64, Vec<f64>> = HashMap::new();
    for x in 0..size {
        let z = f(x as u64);
        if z >> v != 0 {
            return Err(Error::WidthMismatch { value: z, bits: v });
        }
        cols.entry(z).or_insert_with(|| vec![0.0; size])[x] = 1.0;
    }
    let scale = (-(u as f64) * 2.0).exp2();
    let mut dist = vec![0.0; size];
    for col in cols.values_mut() {
        let mut h = 1;
        while h < size {
            for i in 0..size {
                if i & h == 0 {
                    let (a, b) = (col[i], col[i | h]);
                    col[i] = a + b;
                    col[i | h] = a - b;
                }
            }
            h <<= 1;
        }
        for (d, c) in dist.iter_mut().zip(col.iter()) {
            *d += c * c * scale;
        }
    }
    Ok(dist)
}

/// Incremental GF(2) row reduction of u-bit vectors.
#[derive(Debug, Clone, Default)]
pub struct Gf2Basis {
    rows: Vec<u64>,
}

impl Gf2Basis {
    /// Adds `y`; returns whether the rank grew.
    pub fn insert(&mut self, mut y: u64) -> bool {
        for &r in &self.rows {
            y = y.min(y ^ r);
        }
        if y == 0 {
            return false;
        }
        self.rows.push(y);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Nonzero vectors orthogonal to every row.
    pub fn kernel(&self, u: u32) -> Vec<u64> {
        (1..1u64 << u).filter(|&s| self.rows.iter().all(|&r| (r & s).count_ones() % 2 == 0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimonOutcome {
    /// Recovered period; 0 means f looked injective.
    pub period: u64,
    pub samples: Vec<u64>,
    pub rank: usize,
    pub counter: QueryCounter,
}

/// Simon period finding. Each sample is one oracle application. Once rank
/// `u−1` is reached the unique kernel vector `s` is checked with
/// `f(0) = f(s)`; if that fails, sampling continues until rank `u`, which is
/// reported as `s = 0`. Stops after `max_samples`.
pub fn simon_period(
    f: &dyn Fn(u64) -> u64,
    u: u32,
    v: u32,
    max_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SimonOutcome> {
    let dist = simon_distribution(f, u, v)?;
    simon_from_distribution(f, &dist, u, max_samples, rng)
}

fn simon_from_distribution(
    f: &dyn Fn(u64) -> u64,
    dist: &[f64],
    u: u32,
    max_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SimonOutcome> {
    let mut basis = Gf2Basis::default();
    let mut counter = QueryCounter::default();
    let mut samples = Vec::new();
    let mut rejected = None;
    let target = u as usize;
    while samples.len() < max_samples {
        let y = sample_index(dist, rng);
        counter.tick();
        samples.push(y);
        basis.insert(y);
        if basis.rank() == target {
            return Ok(SimonOutcome { period: 0, samples, rank: target, counter });
        }
        if basis.rank() == target - 1 {
            let kernel = basis.kernel(u);
            let s = kernel[0];
            if rejected != Some(s) {
                if f(0) == f(s) {
                    return Ok(SimonOutcome { period: s, samples, rank: target - 1, counter });
                }
                rejected = Some(s);
            }
        }
    }
    Err(Error::RecoveryFailed(format!(
        "rank {} of {u} after {max_samples} Simon samples",
        basis.rank()
    )))
}

/// Offline-Simon recovery of an FX key with `u`-bit windows.
///
/// `g(x) = FX(x << (n−u))` is queried classically on all `2^u` inputs. For each
/// candidate `(i, j)` with `i` an m-bit key and `j` the low `n−u` bits of `k1`,
/// Simon runs on `x ↦ E_i((x << (n−u)) | j) ⊕ g(x)`, whose period is the top
/// `u` bits of `k1` when the candidate is right. The outer search over
/// candidates is a classical loop here. A candidate is accepted when the
/// derived `(k0, k1, k2)` reproduces all `2^u` values of `g` and one fresh
/// query.
///
/// The report's `online_queries` are classical construction queries and
/// `offline_queries` are Simon oracle applications.
pub fn offline_simon_demo<O: TweakableCipher>(
    e: &IdealCipher,
    fx: &O,
    u: u32,
    rng: &mut ChaCha8Rng,
) -> Result<AttackReport> {
    let m = e.params().m;
    let n = e.params().n;
    if u == 0 || u > 8 || u >= n || m > 10 {
        return Err(Error::ParamsOutOfRange(format!("offline Simon needs 1 ≤ u ≤ 8, u < n and m ≤ 10; got u={u}, n={n}, m={m}")));
    }
    let low = n - u;
    let g: Vec<u64> = (0..1u64 << u).map(|x| fx.encrypt(0, x << low)).collect::<Result<_>>()?;
    let mut online = g.len() as u64;
    let mut quantum = 0u64;
    let fresh_x = rng.random::<u64>() & block_mask(n);
    let mut fresh_y = None;
    let cap = 4 * u as usize;

    for i in 0..1u64 << m {
        let table = e.table(i);
        for j in 0..1u64 << low {
            let h = |x: u64| table.apply((x << low) | j) ^ g[x as usize];
            let outcome = match simon_period(&h, u, n, cap, rng) {
                Ok(o) => {
                    quantum += o.counter.quantum_queries;
                    o.period
                }
                Err(Error::RecoveryFailed(_)) => {
                    quantum += cap as u64;
                    0
                }
                Err(err) => return Err(err),
            };
            let k1 = (outcome << low) | j;
            let k2 = g[0] ^ table.apply(k1);
            let consistent = (0..1u64 << u).all(|x| table.apply((x << low) ^ k1) ^ k2 == g[x as usize]);
            if !consistent {
                continue;
            }
            let y = match fresh_y {
                Some(y) => y,
                None => {
                    online += 1;
                    let y = fx.encrypt(0, fresh_x)?;
                    fresh_y = Some(y);
                    y
                }
            };
            if table.apply(fresh_x ^ k1) ^ k2 == y {
                let key = FxKey::new(i, k1, k2);
                return Ok(AttackReport {
                    verdict: Verdict::Real,
                    recovered: Recovered { k: Some(key.k0), k_prime: Some(key.k1), k_tilde: Some(key.k2), hash_value: None },
                    online_queries: online,
                    offline_queries: quantum,
                    no_collision: false,
                    candidates: ((i << low) | j) as usize + 1,
                });
            }
        }
    }
    Err(Error::RecoveryFailed("no candidate key passed verification".into()))
}

/// Grover runs per tweak and candidate key before giving up.
pub const GROVER_KM_RETRIES: usize = 16;

/// Grover-assisted Kuwakado-Morii recovery of LRW keys `(k, k′)` with the
/// multiplicative hash.
///
/// For three random tweaks, `s` complement pairs `d_i = LRW(τ, x_i) ⊕
/// LRW(τ, x̄_i)` are queried classically. For each candidate cipher key `c`
/// (enumerated classically), Grover searches for `z` with
/// `E_c(z) ⊕ E_c(z̄) ∈ D`, which yields `h(τ) ∈ {x ⊕ z, x̄ ⊕ z}`. A probe
/// query at a random `x′` picks between the two by testing
/// `E_c(x′ ⊕ h) ⊕ h = LRW(τ, x′)`. The candidate is accepted when all three
/// tweaks give the same `k′ = h(τ)·τ^{-1}`.
///
/// `online_queries` counts classical construction queries and
/// `offline_queries` counts Grover oracle applications.
pub fn grover_km_demo<O: TweakableCipher>(
    e: &IdealCipher,
    lrw: &O,
    s: usize,
    rng: &mut ChaCha8Rng,
) -> Result<AttackReport> {
    let m = e.params().m;
    let n = e.params().n;
    if n > 10 || m > 8 {
        return Err(Error::ParamsOutOfRange(format!("Grover-KM demo needs n ≤ 10 and m ≤ 8; got n={n}, m={m}")));
    }
    if s == 0 || 2 * s > 1 << n {
        return Err(Error::ParamsOutOfRange(format!("pair count s={s} must be in 1..=2^(n-1)")));
    }
    let mask = block_mask(n);
    let field = FieldSpec::canonical(n)?;
    let mut online = 0u64;

    struct TweakData {
        tau: u64,
        d_table: HashMap<u64, u64>,
        probe_x: u64,
        probe_y: u64,
    }
    let mut tweaks = Vec::with_capacity(3);
    while tweaks.len() < 3 {
        let tau = rng.random_range(1..=mask);
        if tweaks.iter().any(|t: &TweakData| t.tau == tau) {
            continue;
        }
        // Distinct x_i whose complements stay outside the chosen set.
        let mut xs: Vec<u64> = Vec::with_capacity(s);
        while xs.len() < s {
            let x = rng.random::<u64>() & mask;
            if !xs.contains(&x) && !xs.contains(&(x ^ mask)) {
                xs.push(x);
            }
        }
        let mut d_table = HashMap::new();
        for &x in &xs {
            let d = lrw.encrypt(tau, x)? ^ lrw.encrypt(tau, x ^ mask)?;
            online += 2;
            d_table.entry(d).or_insert_with(Vec::new).push(x);
        }
        // D must consist of distinct differences; a repeated d cannot name its
        // x, so it is dropped.
        let d_table: HashMap<u64, u64> =
            d_table.into_iter().filter(|(_, xs)| xs.len() == 1).map(|(d, xs)| (d, xs[0])).collect();
        let probe_x = rng.random::<u64>() & mask;
        let probe_y = lrw.encrypt(tau, probe_x)?;
        online += 1;
        tweaks.push(TweakData { tau, d_table, probe_x, probe_y });
    }

    let mut counter = QueryCounter::default();
    for c in 0..1u64 << m {
        let table = e.table(c);
        let mut hashes = Vec::with_capacity(3);
        for td in &tweaks {
            let marked = |z: u64| td.d_table.contains_key(&(table.apply(z) ^ table.apply(z ^ mask)));
            let t = grover_iterations(n, 2 * td.d_table.len() as u64);
            // Marked points whose difference matches D by accident give a
            // wrong h that the probe rejects, so the search is retried.
            let mut h = None;
            for _ in 0..GROVER_KM_RETRIES {
                let run = grover_search(n, &marked, t, rng, &mut counter)?;
                let Some(z) = run.found else { continue };
                let d = table.apply(z) ^ table.apply(z ^ mask);
                let probe = |h: u64| table.apply(td.probe_x ^ h) ^ h == td.probe_y;
                let x = td.d_table[&d];
                h = [x ^ z, (x ^ mask) ^ z].into_iter().find(|&h| probe(h));
                if h.is_some() {
                    break;
                }
            }
            match h {
                Some(h) => hashes.push((td.tau, h)),
                None => break,
            }
        }
        if hashes.len() < 3 {
            continue;
        }
        let ks: Vec<u64> = hashes.iter().map(|&(tau, h)| field.mul(h, field.inv(tau).expect("tweaks are nonzero"))).collect();
        if ks.iter().all(|&k| k == ks[0]) {
            return Ok(AttackReport {
                verdict: Verdict::Real,
                recovered: Recovered { k: Some(c), k_prime: Some(ks[0]), ..Recovered::default() },
                online_queries: online,
                offline_queries: counter.quantum_queries,
                no_collision: false,
                candidates: c as usize + 1,
            });
        }
    }
    Err(Error::RecoveryFailed("no cipher key produced a consistent hash key".into()))
}

/// A random two-to-one function on `{0,1}^u` with period `s` (or a random
/// injection when `s = 0`), for Simon trials.
pub fn planted_periodic_function(u: u32, s: u64, seed: u64) -> Vec<u64> {
    let size = 1usize << u;
    let mut rng = rng_for(seed);
    let mut labels: Vec<u64> = (0..size as u64).collect();
    rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), &mut rng);
    let mut table = vec![u64::MAX; size];
    let mut next = 0;
    for x in 0..size {
        if table[x] == u64::MAX {
            table[x] = labels[next];
            table[x ^ s as usize] = labels[next];
            next += 1;
        }
    }
    table
}

/// Measured Grover success against the closed-form prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverFrequency {
    pub w: u32,
    pub iterations: u64,
    pub shots: usize,
    pub hits: usize,
    pub frequency: f64,
    /// `sin²((2t+1)·arcsin(2^{-w/2}))`.
    pub predicted: f64,
    /// Binomial standard deviation of the frequency at `predicted`.
    pub sigma: f64,
}

impl GroverFrequency {
    pub fn within_sigmas(&self, k: f64) -> bool {
        (self.frequency - self.predicted).abs() <= k * self.sigma + 1e-12
    }
}

/// `shots` measurements of the Grover state for a single random marked point.
/// `iterations` defaults to `⌊(π/4)·2^{w/2}⌋`.
pub fn grover_frequency(w: u32, iterations: Option<u64>, shots: usize, seed: u64) -> Result<GroverFrequency> {
    if w == 0 || w > MAX_QUBITS {
        return Err(Error::ParamsOutOfRange(format!("Grover width must be in 1..={MAX_QUBITS}, got {w}")));
    }
    let mut rng = rng_for(seed);
    let marked = rng.random::<u64>() & block_mask(w);
    let t = iterations.unwrap_or_else(|| grover_iterations(w, 1));
    let s = grover_state(w, &|x| x == marked, t, &mut QueryCounter::default())?;
    let p = s.probabilities();
    let hits = (0..shots).filter(|_| sample_index(&p, &mut rng) == marked).count();
    let predicted = grover_success_probability(w, 1, t);
    Ok(GroverFrequency {
        w,
        iterations: t,
        shots,
        hits,
        frequency: hits as f64 / shots.max(1) as f64,
        predicted,
        sigma: (predicted * (1.0 - predicted) / shots.max(1) as f64).sqrt(),
    })
}

/// Repeated Simon runs on planted two-to-one functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimonTrials {
    pub u: u32,
    pub trials: usize,
    pub max_samples: usize,
    pub recovered: usize,
    pub total_samples: usize,
    /// Samples `y` with `y·s ≠ 0` for the planted period `s`.
    pub non_orthogonal: usize,
}

impl SimonTrials {
    pub fn recovery_rate(&self) -> f64 {
        self.recovered as f64 / self.trials.max(1) as f64
    }
}

pub fn simon_trials(u: u32, max_samples: usize, trials: usize, seed: u64) -> Result<SimonTrials> {
    if u < 2 || u > 16 {
        return Err(Error::ParamsOutOfRange(format!("Simon trials need 2 ≤ u ≤ 16, got {u}")));
    }
    let runs: Vec<Result<(bool, usize, usize)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = mix(seed, i as u64);
            let mut rng = rng_for(mix(seed, 1));
            let s = rng.random_range(1..=block_mask(u));
            let f = planted_periodic_function(u, s, mix(seed, 2));
            let fx = |x: u64| f[x as usize];
            match simon_period(&fx, u, u, max_samples, &mut rng) {
                Ok(o) => {
                    let bad = o.samples.iter().filter(|&&y| (y & s).count_ones() % 2 == 1).count();
                    Ok((o.period == s, o.samples.len(), bad))
                }
                // A failed run used the whole budget; its samples are not returned.
                Err(Error::RecoveryFailed(_)) => Ok((false, max_samples, 0)),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut out = SimonTrials { u, trials, max_samples, recovered: 0, total_samples: 0, non_orthogonal: 0 };
    for r in runs {
        let (ok, n, bad) = r?;
        out.recovered += ok as usize;
        out.total_samples += n;
        out.non_orthogonal += bad;
    }
    Ok(out)
}

/// Aggregate of repeated composite-attack demos.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoTrials {
    pub trials: usize,
    /// Runs whose recovered key matched the planted key.
    pub recovered: usize,
    pub mean_online_queries: f64,
    pub max_online_queries: u64,
    pub mean_offline_queries: f64,
}

impl DemoTrials {
    pub fn recovery_rate(&self) -> f64 {
        self.recovered as f64 / self.trials.max(1) as f64
    }

    fn collect(runs: Vec<Result<Option<(bool, u64, u64)>>>) -> Result<Self> {
        let trials = runs.len();
        let mut out = DemoTrials { trials, recovered: 0, mean_online_queries: 0.0, max_online_queries: 0, mean_offline_queries: 0.0 };
        let mut done = 0usize;
        for r in runs {
            if let Some((ok, on, off)) = r? {
                out.recovered += ok as usize;
                out.max_online_queries = out.max_online_queries.max(on);
                out.mean_online_queries += on as f64;
                out.mean_offline_queries += off as f64;
                done += 1;
            }
        }
        out.mean_online_queries /= done.max(1) as f64;
        out.mean_offline_queries /= done.max(1) as f64;
        Ok(out)
    }
}

/// [`offline_simon_demo`] against freshly planted FX keys.
pub fn offline_simon_trials(m: u32, n: u32, u: u32, trials: usize, seed: u64) -> Result<DemoTrials> {
    let runs = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = mix(seed, i as u64);
            let e = IdealCipher::new(CipherParams::new(m, n, mix(seed, 0xE)))?;
            let mut rng = rng_for(mix(seed, 0xF));
            let key = FxKey::new(
                rng.random::<u64>() & block_mask(m),
                rng.random::<u64>() & block_mask(n),
                rng.random::<u64>() & block_mask(n),
            );
            let fx = FxCipher { cipher: &e, key };
            match offline_simon_demo(&e, &fx, u, &mut rng) {
                Ok(r) => {
                    let ok = r.recovered.k == Some(key.k0) && r.recovered.k_prime == Some(key.k1) && r.recovered.k_tilde == Some(key.k2);
                    Ok(Some((ok, r.online_queries, r.offline_queries)))
                }
                Err(Error::RecoveryFailed(_)) => Ok(Some((false, 1 << u, 0))),
                Err(err) => Err(err),
            }
        })
        .collect();
    DemoTrials::collect(runs)
}

/// [`grover_km_demo`] against freshly planted LRW keys with the
/// multiplicative hash.
pub fn grover_km_trials(m: u32, n: u32, s: usize, trials: usize, seed: u64) -> Result<DemoTrials> {
    let field = FieldSpec::canonical(n)?;
    let runs = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = mix(seed, i as u64);
            let e = IdealCipher::new(CipherParams::new(m, n, mix(seed, 0xE)))?;
            let mut rng = rng_for(mix(seed, 0xF));
            let k = rng.random::<u64>() & block_mask(m);
            let k_prime = rng.random_range(1..=block_mask(n));
            let lrw = LrwCipher { cipher: &e, hash: MultiplicativeHash::new(field), key: LrwKey { k, k_prime } };
            match grover_km_demo(&e, &lrw, s, &mut rng) {
                Ok(r) => Ok(Some((r.recovered.k == Some(k) && r.recovered.k_prime == Some(k_prime), r.online_queries, r.offline_queries))),
                Err(Error::RecoveryFailed(_)) => Ok(None),
                Err(err) => Err(err),
            }
        })
        .collect();
    DemoTrials::collect(runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_state_is_normalized() {
        for w in [1, 5, 10] {
            StateVector::uniform(w).unwrap().check_norm().unwrap();
        }
        assert!(StateVector::zero(25).is_err());
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let mut s = StateVector::zero(4).unwrap();
        s.hadamard(0b1111);
        s.hadamard(0b1111);
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_iteration_at_two_qubits_is_certain() {
        let mut c = QueryCounter::default();
        let s = grover_state(2, &|x| x == 3, 1, &mut c).unwrap();
        assert!((s.probabilities()[3] - 1.0).abs() < 1e-12);
        assert_eq!(c.quantum_queries, 1);
        assert!((grover_success_probability(2, 1, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_marked_element_leaves_uniform_state() {
        let (found, c) = grover_unique_search(&|_| false, 6, None, &mut rng_for(1)).unwrap();
        assert_eq!(found, None);
        assert_eq!(c.quantum_queries, grover_iterations(6, 1));
        let s = grover_state(6, &|_| false, 4, &mut QueryCounter::default()).unwrap();
        assert!(s.probabilities().iter().all(|p| (p - 1.0 / 64.0).abs() < 1e-12));
    }

    #[test]
    fn promise_violation() {
        let r = grover_unique_search(&|x| x < 2, 4, None, &mut rng_for(1));
        assert!(matches!(r, Err(Error::PromiseViolated(_))));
    }

    #[test]
    fn simon_injective_reports_zero() {
        let f = planted_periodic_function(5, 0, 3);
        let o = simon_period(&|x| f[x as usize], 5, 5, 200, &mut rng_for(2)).unwrap();
        assert_eq!(o.period, 0);
        assert_eq!(o.rank, 5);
    }

    #[test]
    fn gf2_basis_kernel() {
        let mut b = Gf2Basis::default();
        assert!(b.insert(0b011));
        assert!(b.insert(0b101));
        assert!(!b.insert(0b110));
        assert_eq!(b.kernel(3), vec![0b111]);
    }
}
