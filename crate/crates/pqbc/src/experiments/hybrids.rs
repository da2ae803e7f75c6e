//! Exhaustive checks of the hybrid identities behind the FX and LRW proofs.
//!
//! For each random instance `(E, K, T_j)` the verifier checks:
//!
//! * consistency: `E^{T_j,K}_k(x_i ⊕ u_i) ⊕ v_i = y_i` for every entry,
//!   and the same through the inverse;
//! * agreement of the resampled chain with the original on every recorded
//!   point, for every prefix `T_r`;
//! * that answering query `j+1` through `(E^{(1)})^{T_j,K}` yields
//!   `E^{T_j,K}(s) ⊕ v`, lands outside the recorded outputs, and leaves a
//!   cipher whose full forward and inverse tables equal those of
//!   `E^{T_{j+1},K}`. Both query directions are checked.
//!
//! LRW instances with a mask collision (`Bad_j`) are counted and skipped.
//! The law of the fresh answer is checked exactly on a subset of instances
//! (enumerating every `s`) and by a pooled chi-square test on all of them.

use crate::cipher::{block_mask, forward_table, inverse_table, mix, rng_for, CipherFamily, CipherParams, Entry,
    IdealCipher, ModifiedCipher, OffsetRule, ResampledCipher, Transcript};
use crate::error::{Error, Result};
use crate::gf2n::FieldSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashSet;

/// Largest block and key width the verifier accepts.
pub const MAX_HYBRID_BITS: u32 = 8;
/// Largest transcript length the verifier accepts.
pub const MAX_HYBRID_J: usize = 16;
/// Rank bins of the pooled chi-square test.
pub const CHI_SQUARE_BINS: usize = 16;
/// Significance level below which the uniformity test fails.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HybridConstruction {
    Fx,
    Lrw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepDirection {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridParams {
    pub construction: HybridConstruction,
    pub m: u32,
    pub n: u32,
    /// Each instance draws `j` uniformly from `0..=j_max`.
    pub j_max: usize,
    pub count: usize,
    pub seed: u64,
    /// Every this many instances the law of the fresh answer is checked by
    /// enumerating all `s`; 0 disables it.
    pub exact_support_every: usize,
    /// LRW tweaks are drawn from `1..=tweak_pool`, so repeats are common.
    pub tweak_pool: u64,
}

impl HybridParams {
    pub fn new(construction: HybridConstruction, m: u32, n: u32, j_max: usize, count: usize) -> Self {
        Self { construction, m, n, j_max, count, seed: 0, exact_support_every: 10, tweak_pool: 4 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_HYBRID_BITS || self.m == 0 || self.m > MAX_HYBRID_BITS {
            return Err(Error::ParamsOutOfRange(format!("hybrid checks need 1 <= n, m <= {MAX_HYBRID_BITS}")));
        }
        if self.j_max > MAX_HYBRID_J || self.j_max + 1 >= 1 << self.n {
            return Err(Error::ParamsOutOfRange(format!("j_max must be at most {MAX_HYBRID_J} and below 2^n - 1")));
        }
        if self.construction == HybridConstruction::Lrw && (self.n < 2 || self.tweak_pool == 0) {
            return Err(Error::ParamsOutOfRange("LRW checks need n >= 2 and a nonempty tweak pool".into()));
        }
        Ok(())
    }
}

/// Rank of a fresh answer within the set it must be uniform over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RankSample {
    rank: u64,
    size: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceStats {
    pub pointwise_checks: usize,
    pub agreement_checks: usize,
    pub table_comparisons: usize,
    pub exact_support_checks: usize,
    /// The step precondition `x_{j+1} ⊕ u ∉ {x_i ⊕ u_i}` (or its inverse
    /// analogue) failed, so the step was skipped.
    pub excluded_forward: bool,
    pub excluded_inverse: bool,
    forward: Option<RankSample>,
    inverse: Option<RankSample>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceOutcome {
    /// `Bad_j` holds; the identities are not claimed.
    Bad,
    Checked(InstanceStats),
}

/// `Bad_j`: a collision among `{x_i ⊕ u_i}` or among `{y_i ⊕ v_i}`.
pub fn bad_event(rule: &OffsetRule, t: &Transcript) -> bool {
    let mut ins = HashSet::new();
    let mut outs = HashSet::new();
    for e in t.entries() {
        let (u, v) = rule.offsets(e.tweak);
        if !ins.insert(e.x ^ u) || !outs.insert(e.y ^ v) {
            return true;
        }
    }
    false
}

fn violation(what: &str, rule: &OffsetRule, t: &Transcript, extra: String) -> Error {
    Error::IdentityViolation(format!("{what}: {rule:?}, transcript {:?}, {extra}", t.entries()))
}

fn rank_in_complement(value: u64, excluded: &[u64], n: u32) -> RankSample {
    let below = excluded.iter().filter(|&&b| b < value).count() as u64;
    RankSample { rank: value - below, size: (1u64 << n) - excluded.len() as u64 }
}

fn sample_outside(rng: &mut ChaCha8Rng, n: u32, excluded: &HashSet<u64>) -> u64 {
    loop {
        let s = rng.random::<u64>() & block_mask(n);
        if !excluded.contains(&s) {
            return s;
        }
    }
}

fn compare_tables<A: CipherFamily, B: CipherFamily>(a: &A, b: &B, keys: &[u64]) -> bool {
    keys.iter().all(|&k| forward_table(a, k) == forward_table(b, k) && inverse_table(a, k) == inverse_table(b, k))
}

/// The resampled chain agrees with the original on every recorded input
/// (forward) or output (inverse), for every prefix of the transcript.
fn check_agreement<C: CipherFamily>(
    e: &IdealCipher,
    e1: &ResampledCipher<C>,
    rule: &OffsetRule,
    t: &Transcript,
    dir: StepDirection,
) -> Result<usize> {
    let key = rule.target_key();
    let mut checks = 0;
    for r in 0..=t.len() {
        let prefix = t.prefix(r);
        let orig = ModifiedCipher::build(e, rule.clone(), &prefix)?;
        let resampled = ModifiedCipher::build(e1, rule.clone(), &prefix)?;
        for entry in t.entries() {
            let (u, v) = rule.offsets(entry.tweak);
            let ok = match dir {
                StepDirection::Forward => resampled.enc(key, entry.x ^ u) == orig.enc(key, entry.x ^ u),
                StepDirection::Inverse => resampled.dec(key, entry.y ^ v) == orig.dec(key, entry.y ^ v),
            };
            if !ok {
                return Err(violation("resampled chain disagrees on a recorded point", rule, t, format!("prefix {r}")));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

/// Answers query `j+1` through the resampled chain for one choice of `s` and
/// returns `(answer, E^{(1)} chain)`: the output `y` for a forward step or the
/// input `x` for an inverse step.
fn answer_via_resampled<'a>(
    e: &'a IdealCipher,
    rule: &OffsetRule,
    t: &Transcript,
    dir: StepDirection,
    tweak: Option<u64>,
    query: u64,
    s: u64,
) -> Result<(u64, ModifiedCipher<ResampledCipher<&'a IdealCipher>>)> {
    let key = rule.target_key();
    let (u, v) = rule.offsets(tweak);
    let e1 = match dir {
        StepDirection::Forward => ResampledCipher::new(e, key, query ^ u, s),
        StepDirection::Inverse => ResampledCipher::new(e, key, e.dec(key, query ^ v), e.dec(key, s)),
    };
    let m1 = ModifiedCipher::build(e1, rule.clone(), t)?;
    let answer = match dir {
        StepDirection::Forward => m1.enc(key, query ^ u) ^ v,
        StepDirection::Inverse => m1.dec(key, query ^ v) ^ u,
    };
    Ok((answer, m1))
}

#[allow(clippy::too_many_arguments)]
fn hybrid_step(
    e: &IdealCipher,
    rule: &OffsetRule,
    t: &Transcript,
    dir: StepDirection,
    tweak: Option<u64>,
    query: u64,
    rng: &mut ChaCha8Rng,
    exact_support: bool,
    stats: &mut InstanceStats,
) -> Result<()> {
    let n = e.block_bits();
    let key = rule.target_key();
    let (u, v) = rule.offsets(tweak);
    let ins: Vec<u64> = t.entries().iter().map(|en| en.x ^ rule.offsets(en.tweak).0).collect();
    let outs: Vec<u64> = t.entries().iter().map(|en| en.y ^ rule.offsets(en.tweak).1).collect();
    // Forward steps resample on the input side, inverse steps on the output side.
    let (same_side, other_side, masked_query) = match dir {
        StepDirection::Forward => (&ins, &outs, query ^ u),
        StepDirection::Inverse => (&outs, &ins, query ^ v),
    };
    let same_set: HashSet<u64> = same_side.iter().copied().collect();
    if same_set.contains(&masked_query) {
        match dir {
            StepDirection::Forward => stats.excluded_forward = true,
            StepDirection::Inverse => stats.excluded_inverse = true,
        }
        return Ok(());
    }
    let s = sample_outside(rng, n, &same_set);
    let e1 = match dir {
        StepDirection::Forward => ResampledCipher::new(e, key, masked_query, s),
        StepDirection::Inverse => ResampledCipher::new(e, key, e.dec(key, masked_query), e.dec(key, s)),
    };
    stats.agreement_checks += check_agreement(e, &e1, rule, t, dir)?;

    let (answer, m1) = answer_via_resampled(e, rule, t, dir, tweak, query, s)?;
    let mj = ModifiedCipher::build(e, rule.clone(), t)?;
    let (expected, masked_answer) = match dir {
        StepDirection::Forward => (mj.enc(key, s) ^ v, answer ^ v),
        StepDirection::Inverse => (mj.dec(key, s) ^ u, answer ^ u),
    };
    if answer != expected {
        return Err(violation(
            "fresh answer differs from E^{T_j}(s) with the output mask",
            rule,
            t,
            format!("{dir:?} query {query:#x}, s {s:#x}"),
        ));
    }
    let other_set: HashSet<u64> = other_side.iter().copied().collect();
    if other_set.contains(&masked_answer) {
        return Err(violation("fresh answer hits a recorded value", rule, t, format!("{dir:?} answer {answer:#x}")));
    }
    let same_tweak_clash = t.entries().iter().any(|en| {
        en.tweak == tweak
            && match dir {
                StepDirection::Forward => en.y == answer,
                StepDirection::Inverse => en.x == answer,
            }
    });
    if same_tweak_clash {
        return Err(violation("fresh answer repeats under the same tweak", rule, t, format!("{answer:#x}")));
    }

    let mut next = t.clone();
    let entry = match dir {
        StepDirection::Forward => Entry { tweak, x: query, y: answer },
        StepDirection::Inverse => Entry { tweak, x: answer, y: query },
    };
    next.push(entry).map_err(|_| violation("extended transcript repeats a query", rule, t, format!("{entry:?}")))?;
    let m2 = ModifiedCipher::build(e, rule.clone(), &next)?;
    let other_key = (key ^ 1) & block_mask(e.params().m);
    if !compare_tables(&m1, &m2, &[key, other_key]) {
        return Err(violation("(E^(1))^{T_j} and E^{T_{j+1}} tables differ", rule, t, format!("{entry:?}, s {s:#x}")));
    }
    stats.table_comparisons += 1;

    let mut other_sorted = other_side.clone();
    other_sorted.sort_unstable();
    let sample = rank_in_complement(masked_answer, &other_sorted, n);
    match dir {
        StepDirection::Forward => stats.forward = Some(sample),
        StepDirection::Inverse => stats.inverse = Some(sample),
    }

    if exact_support {
        let mut hit = vec![false; 1 << n];
        for cand in 0..1u64 << n {
            if same_set.contains(&cand) {
                continue;
            }
            let (a, _) = answer_via_resampled(e, rule, t, dir, tweak, query, cand)?;
            let masked = match dir {
                StepDirection::Forward => a ^ v,
                StepDirection::Inverse => a ^ u,
            };
            if other_set.contains(&masked) || std::mem::replace(&mut hit[masked as usize], true) {
                return Err(violation("fresh-answer map is not a bijection onto the complement", rule, t, format!("s {cand:#x}")));
            }
        }
        stats.exact_support_checks += 1;
    }
    Ok(())
}

/// Checks one instance. `forward` and `inverse` are the optional `(τ, x)`
/// and `(τ, y)` queries for step `j+1`.
pub fn check_instance(
    e: &IdealCipher,
    rule: &OffsetRule,
    t: &Transcript,
    forward: Option<(Option<u64>, u64)>,
    inverse: Option<(Option<u64>, u64)>,
    rng: &mut ChaCha8Rng,
    exact_support: bool,
) -> Result<InstanceOutcome> {
    if bad_event(rule, t) {
        return Ok(InstanceOutcome::Bad);
    }
    let key = rule.target_key();
    let mut stats = InstanceStats::default();
    let mj = ModifiedCipher::build(e, rule.clone(), t)?;
    for entry in t.entries() {
        let (u, v) = rule.offsets(entry.tweak);
        if mj.enc(key, entry.x ^ u) ^ v != entry.y || mj.dec(key, entry.y ^ v) ^ u != entry.x {
            return Err(violation("modified cipher inconsistent with its transcript", rule, t, format!("{entry:?}")));
        }
        stats.pointwise_checks += 1;
    }
    if let Some((tweak, x)) = forward {
        hybrid_step(e, rule, t, StepDirection::Forward, tweak, x, rng, exact_support, &mut stats)?;
    }
    if let Some((tweak, y)) = inverse {
        hybrid_step(e, rule, t, StepDirection::Inverse, tweak, y, rng, exact_support, &mut stats)?;
    }
    Ok(InstanceOutcome::Checked(stats))
}

/// A random instance: the cipher, the offset rule, a transcript answered by
/// an ideal (tweakable) permutation, and one fresh query per direction.
struct RandomInstance {
    e: IdealCipher,
    rule: OffsetRule,
    t: Transcript,
    forward: (Option<u64>, u64),
    inverse: (Option<u64>, u64),
}

fn fresh(rng: &mut ChaCha8Rng, n: u32, used: &HashSet<(Option<u64>, u64)>, tweak: Option<u64>) -> u64 {
    loop {
        let v = rng.random::<u64>() & block_mask(n);
        if !used.contains(&(tweak, v)) {
            return v;
        }
    }
}

fn lrw_rule(k: u64, k_prime: u64, field: FieldSpec) -> OffsetRule {
    OffsetRule::tweaked(k, move |tw| field.hash_mul(k_prime, tw.unwrap_or(0)))
}

fn random_transcript(
    rng: &mut ChaCha8Rng,
    n: u32,
    j: usize,
    tweak_of: &dyn Fn(&mut ChaCha8Rng) -> Option<u64>,
) -> Result<(Transcript, HashSet<(Option<u64>, u64)>, HashSet<(Option<u64>, u64)>)> {
    let mut t = Transcript::new();
    let mut xs = HashSet::new();
    let mut ys = HashSet::new();
    for _ in 0..j {
        let tw = tweak_of(rng);
        let x = fresh(rng, n, &xs, tw);
        let y = fresh(rng, n, &ys, tw);
        xs.insert((tw, x));
        ys.insert((tw, y));
        t.push(Entry { tweak: tw, x, y })?;
    }
    Ok((t, xs, ys))
}

fn random_instance(p: &HybridParams, j: usize, seed: u64) -> Result<RandomInstance> {
    let e = IdealCipher::new(CipherParams::new(p.m, p.n, mix(seed, 0xE)))?;
    let mut rng = rng_for(mix(seed, 0x7));
    let k = rng.random::<u64>() & block_mask(p.m);
    let pool = p.tweak_pool;
    let (rule, tweak_of): (OffsetRule, Box<dyn Fn(&mut ChaCha8Rng) -> Option<u64>>) = match p.construction {
        HybridConstruction::Fx => {
            let k1 = rng.random::<u64>() & block_mask(p.n);
            let k2 = rng.random::<u64>() & block_mask(p.n);
            (OffsetRule::fx(k, k1, k2), Box::new(|_| None))
        }
        HybridConstruction::Lrw => {
            let field = FieldSpec::canonical(p.n)?;
            let k_prime = rng.random::<u64>() & block_mask(p.n);
            (lrw_rule(k, k_prime, field), Box::new(move |r: &mut ChaCha8Rng| Some(r.random_range(1..=pool))))
        }
    };
    let (t, xs, ys) = random_transcript(&mut rng, p.n, j, &*tweak_of)?;
    let ft = tweak_of(&mut rng);
    let forward = (ft, fresh(&mut rng, p.n, &xs, ft));
    let it = tweak_of(&mut rng);
    let inverse = (it, fresh(&mut rng, p.n, &ys, it));
    Ok(RandomInstance { e, rule, t, forward, inverse })
}

/// Pooled chi-square test of the fresh answers' ranks against the exact
/// uniform law on each instance's complement set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareSummary {
    pub direction: StepDirection,
    pub samples: usize,
    pub bins: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareSummary {
    pub fn passed(&self) -> bool {
        self.p_value > CHI_SQUARE_ALPHA
    }
}

fn chi_square(direction: StepDirection, samples: &[RankSample]) -> ChiSquareSummary {
    let bins = CHI_SQUARE_BINS;
    let mut observed = vec![0f64; bins];
    let mut expected = vec![0f64; bins];
    for s in samples {
        let b = bins as u64;
        observed[(s.rank * b / s.size) as usize] += 1.0;
        // Ranks r with floor(r·B/N) = i are exactly ceil(iN/B) <= r < ceil((i+1)N/B).
        for (i, slot) in expected.iter_mut().enumerate() {
            let i = i as u64;
            let count = ((i + 1) * s.size).div_ceil(b) - (i * s.size).div_ceil(b);
            *slot += count as f64 / s.size as f64;
        }
    }
    let used: Vec<(f64, f64)> = observed.into_iter().zip(expected).filter(|&(_, e)| e > 0.0).collect();
    let statistic: f64 = used.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = used.len().saturating_sub(1);
    let p_value = if samples.is_empty() || dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic)
    };
    ChiSquareSummary { direction, samples: samples.len(), bins, statistic, dof, p_value }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridReport {
    pub params: HybridParams,
    pub instances: usize,
    pub bad_instances: usize,
    pub excluded_forward: usize,
    pub excluded_inverse: usize,
    pub pointwise_checks: usize,
    pub agreement_checks: usize,
    pub table_comparisons: usize,
    pub exact_support_checks: usize,
    pub forward_law: ChiSquareSummary,
    pub inverse_law: ChiSquareSummary,
}

impl HybridReport {
    pub fn uniformity_ok(&self) -> bool {
        self.forward_law.passed() && self.inverse_law.passed()
    }
}

/// Runs the checks on `params.count` random instances. An identity failure
/// is returned as [`Error::IdentityViolation`] naming the instance.
pub fn verify_hybrids(params: &HybridParams) -> Result<HybridReport> {
    params.validate()?;
    let outcomes: Vec<Result<InstanceOutcome>> = (0..params.count)
        .into_par_iter()
        .map(|i| {
            let seed = mix(params.seed, i as u64);
            let mut rng = rng_for(mix(seed, 0x5));
            let j = rng.random_range(0..=params.j_max);
            let inst = random_instance(params, j, seed)?;
            let exact = params.exact_support_every > 0 && i % params.exact_support_every == 0;
            check_instance(&inst.e, &inst.rule, &inst.t, Some(inst.forward), Some(inst.inverse), &mut rng, exact)
                .map_err(|err| match err {
                    Error::IdentityViolation(msg) => Error::IdentityViolation(format!("instance {i} (j = {j}): {msg}")),
                    other => other,
                })
        })
        .collect();
    let mut report = HybridReport {
        params: *params,
        instances: params.count,
        bad_instances: 0,
        excluded_forward: 0,
        excluded_inverse: 0,
        pointwise_checks: 0,
        agreement_checks: 0,
        table_comparisons: 0,
        exact_support_checks: 0,
        forward_law: chi_square(StepDirection::Forward, &[]),
        inverse_law: chi_square(StepDirection::Inverse, &[]),
    };
    let mut fwd = Vec::new();
    let mut inv = Vec::new();
    for o in outcomes {
        match o? {
            InstanceOutcome::Bad => report.bad_instances += 1,
            InstanceOutcome::Checked(s) => {
                report.excluded_forward += s.excluded_forward as usize;
                report.excluded_inverse += s.excluded_inverse as usize;
                report.pointwise_checks += s.pointwise_checks;
                report.agreement_checks += s.agreement_checks;
                report.table_comparisons += s.table_comparisons;
                report.exact_support_checks += s.exact_support_checks;
                fwd.extend(s.forward);
                inv.extend(s.inverse);
            }
        }
    }
    report.forward_law = chi_square(StepDirection::Forward, &fwd);
    report.inverse_law = chi_square(StepDirection::Inverse, &inv);
    Ok(report)
}

/// Empirical `Pr[Bad_j]` for LRW with the multiplicative hash against
/// `j²/2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BadRate {
    pub n: u32,
    pub j: usize,
    pub instances: usize,
    pub bad: usize,
    pub rate: f64,
    pub bound: f64,
    /// Binomial standard deviation at the bound.
    pub sigma: f64,
}

impl BadRate {
    /// `rate ≤ j²/2^n + 3σ`.
    pub fn within(&self) -> bool {
        self.rate <= self.bound + 3.0 * self.sigma
    }
}

/// Samples `instances` LRW transcripts of length `j` (tweaks from
/// `1..=tweak_pool`, answers from an ideal tweakable permutation) with a
/// uniform hash key and counts `Bad_j`.
pub fn bad_rate(n: u32, j: usize, instances: usize, tweak_pool: u64, seed: u64) -> Result<BadRate> {
    let field = FieldSpec::canonical(n)?;
    if instances == 0 || tweak_pool == 0 || j as u64 >= 1 << n {
        return Err(Error::ParamsOutOfRange("bad_rate needs instances >= 1, a tweak pool and j < 2^n".into()));
    }
    let bad = (0..instances)
        .into_par_iter()
        .map(|i| -> Result<bool> {
            let mut rng = rng_for(mix(seed, i as u64));
            let k_prime = rng.random::<u64>() & block_mask(n);
            let (t, _, _) = random_transcript(&mut rng, n, j, &|r: &mut ChaCha8Rng| Some(r.random_range(1..=tweak_pool)))?;
            Ok(bad_event(&lrw_rule(0, k_prime, field), &t))
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    let rate = bad as f64 / instances as f64;
    let bound = (j * j) as f64 / (1u64 << n) as f64;
    let p0 = bound.min(1.0);
    Ok(BadRate { n, j, instances, bad, rate, bound, sigma: (p0 * (1.0 - p0) / instances as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fx_run_is_clean() {
        let r = verify_hybrids(&HybridParams::new(HybridConstruction::Fx, 6, 6, 6, 40).with_seed(3)).unwrap();
        assert_eq!(r.bad_instances, 0);
        assert_eq!(r.excluded_forward + r.excluded_inverse, 0);
        assert_eq!(r.table_comparisons, 80);
        assert!(r.exact_support_checks >= 8);
    }

    #[test]
    fn small_lrw_run_is_clean() {
        let r = verify_hybrids(&HybridParams::new(HybridConstruction::Lrw, 6, 6, 6, 40).with_seed(4)).unwrap();
        assert!(r.table_comparisons > 0);
    }

    #[test]
    fn zero_length_transcript() {
        let e = IdealCipher::new(CipherParams::new(4, 4, 1)).unwrap();
        let rule = OffsetRule::fx(3, 5, 9);
        let mut rng = rng_for(1);
        let out =
            check_instance(&e, &rule, &Transcript::new(), Some((None, 2)), Some((None, 7)), &mut rng, true).unwrap();
        match out {
            InstanceOutcome::Checked(s) => {
                assert_eq!(s.pointwise_checks, 0);
                assert_eq!(s.table_comparisons, 2);
                assert_eq!(s.exact_support_checks, 2);
            }
            InstanceOutcome::Bad => panic!("empty transcript cannot be bad"),
        }
    }

    #[test]
    fn planted_collision_is_bad() {
        let field = FieldSpec::canonical(8).unwrap();
        let k_prime = 0x53;
        let rule = lrw_rule(1, k_prime, field);
        let (h1, h2) = (field.hash_mul(k_prime, 1), field.hash_mul(k_prime, 2));
        // x_1 ⊕ h(1) = x_2 ⊕ h(2)
        let t = Transcript::from_entries([
            Entry { tweak: Some(1), x: 0x10, y: 0x20 },
            Entry { tweak: Some(2), x: 0x10 ^ h1 ^ h2, y: 0x21 },
        ])
        .unwrap();
        let e = IdealCipher::new(CipherParams::new(8, 8, 1)).unwrap();
        let mut rng = rng_for(2);
        assert_eq!(check_instance(&e, &rule, &t, None, None, &mut rng, false).unwrap(), InstanceOutcome::Bad);
    }

    #[test]
    fn chi_square_of_perfect_spread() {
        let samples: Vec<RankSample> = (0..256).map(|r| RankSample { rank: r, size: 256 }).collect();
        let s = chi_square(StepDirection::Forward, &samples);
        assert!(s.statistic.abs() < 1e-9);
        assert!(s.p_value > 0.999);
    }
}
