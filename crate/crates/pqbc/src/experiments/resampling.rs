//! The resampling experiment on an ideal cipher and the reprogramming
//! experiment on a random function, with classical strategies.
//!
//! World `b = 0` keeps the original object and world `b = 1` gets the
//! modified one; each world has its own trial pool. The reported advantage is
//! `|Pr[1 | b=1] − Pr[1 | b=0]|`.

use super::{trial_seed, AdvantageEstimate, SeedInfo, IDEAL_STREAM, REAL_STREAM};
use crate::bounds::{bound_reprogramming, bound_resampling};
use crate::cipher::{block_mask, mix, rng_for, CipherFamily, CipherParams, IdealCipher, ResampledCipher};
use crate::error::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// How the distinguisher picks the distribution `D` of `(k0, s0, s1)` after
/// phase 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ResamplingDistribution {
    /// Uniform over `{0,1}^{m+2n}`; `ε = 2^{-(m+2n)}`.
    Uniform,
    /// All mass on the first phase-1 query `(k, x)` with `s1 = x ⊕ 1`; `ε = 1`.
    PointMassOnQueried,
    /// `(k0, s0)` uniform over the `q` recorded queries, `s1` uniform;
    /// `ε = 1/(q·2^n)`.
    UniformOverQueried,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Phase1Strategy {
    /// No queries.
    Idle,
    /// `q` distinct uniformly random forward queries `(k, x)`.
    RandomForward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Phase3Strategy {
    /// Re-query every recorded point and output 1 if any answer changed.
    RecheckRecorded,
    /// Output 1 iff `E_{k0}(s0) < E_{k0}(s1)`, ignoring phase 1.
    RevealedOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplingConfig {
    pub m: u32,
    pub n: u32,
    /// Phase-1 query budget.
    pub q: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub distribution: ResamplingDistribution,
    pub phase1: Phase1Strategy,
    pub phase3: Phase3Strategy,
}

impl ResamplingConfig {
    /// `ε`, the largest point probability of `D`.
    pub fn epsilon(&self) -> f64 {
        let (m, n) = (self.m as f64, self.n as f64);
        match self.distribution {
            ResamplingDistribution::Uniform => (-(m + 2.0 * n)).exp2(),
            ResamplingDistribution::PointMassOnQueried => 1.0,
            ResamplingDistribution::UniformOverQueried => 1.0 / (self.q as f64 * n.exp2()),
        }
    }

    fn validate(&self) -> Result<()> {
        CipherParams::new(self.m, self.n, 0).validate()?;
        if self.trials == 0 {
            return Err(Error::ParamsOutOfRange("trials must be at least 1".into()));
        }
        if self.q > 1 << (self.m + self.n).min(30) {
            return Err(Error::ParamsOutOfRange("phase-1 budget exceeds the number of cipher inputs".into()));
        }
        let needs_record = matches!(
            self.distribution,
            ResamplingDistribution::PointMassOnQueried | ResamplingDistribution::UniformOverQueried
        );
        if needs_record && (self.q == 0 || self.phase1 == Phase1Strategy::Idle) {
            return Err(Error::ParamsOutOfRange("this distribution needs recorded phase-1 queries".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResamplingResult {
    pub config: ResamplingConfig,
    pub estimate: AdvantageEstimate,
    pub epsilon: f64,
    /// `4√(2^n·q·ε)`.
    pub bound: f64,
    pub bound_vacuous: bool,
    pub seeds: SeedInfo,
}

fn resampling_trial(cfg: &ResamplingConfig, b: bool, seed: u64) -> Result<bool> {
    let (m, n) = (cfg.m, cfg.n);
    let e = IdealCipher::new(CipherParams::new(m, n, mix(seed, 0xE)))?;
    let mut rng = rng_for(mix(seed, 0x3));
    let mut recorded: Vec<(u64, u64, u64)> = Vec::new();
    if cfg.phase1 == Phase1Strategy::RandomForward {
        let mut seen = HashSet::new();
        while (recorded.len() as u64) < cfg.q {
            let k = rng.random::<u64>() & block_mask(m);
            let x = rng.random::<u64>() & block_mask(n);
            if seen.insert((k, x)) {
                recorded.push((k, x, e.enc(k, x)));
            }
        }
    }
    let (k0, s0, s1) = match cfg.distribution {
        ResamplingDistribution::Uniform => {
            (rng.random::<u64>() & block_mask(m), rng.random::<u64>() & block_mask(n), rng.random::<u64>() & block_mask(n))
        }
        ResamplingDistribution::PointMassOnQueried => {
            let (k, x, _) = recorded[0];
            (k, x, x ^ 1)
        }
        ResamplingDistribution::UniformOverQueried => {
            let (k, x, _) = recorded[rng.random_range(0..recorded.len())];
            (k, x, rng.random::<u64>() & block_mask(n))
        }
    };
    let (swap_a, swap_b) = if b { (s0, s1) } else { (s0, s0) };
    let eb = ResampledCipher::new(&e, k0, swap_a, swap_b);
    Ok(match cfg.phase3 {
        Phase3Strategy::RecheckRecorded => recorded.iter().any(|&(k, x, y)| eb.enc(k, x) != y),
        Phase3Strategy::RevealedOrder => eb.enc(k0, s0) < eb.enc(k0, s1),
    })
}

/// The resampling experiment: phase-1 queries, then `(k0, s0, s1) ← D`,
/// then unrestricted access to `E^{(b)}`, with `E^{(1)}_{k0} = E_{k0} ∘
/// swap(s0, s1)`.
pub fn run_resampling(cfg: &ResamplingConfig) -> Result<ResamplingResult> {
    cfg.validate()?;
    let world = |b: bool, stream: u64| -> Result<u64> {
        let r: Vec<Result<bool>> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| resampling_trial(cfg, b, trial_seed(cfg.master_seed, stream, i)))
            .collect();
        r.into_iter().try_fold(0, |acc, x| Ok(acc + x? as u64))
    };
    let ones_1 = world(true, REAL_STREAM)?;
    let ones_0 = world(false, IDEAL_STREAM)?;
    let epsilon = cfg.epsilon();
    let bound = bound_resampling(cfg.n, cfg.q as f64, epsilon);
    Ok(ResamplingResult {
        config: *cfg,
        estimate: AdvantageEstimate::from_counts(ones_1, cfg.trials, ones_0, cfg.trials),
        epsilon,
        bound,
        bound_vacuous: bound >= 1.0,
        seeds: SeedInfo::new(cfg.master_seed),
    })
}

/// How the reprogrammed set `B` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReprogramSet {
    /// Nothing is reprogrammed; `ε = 0`.
    Empty,
    /// One uniform point gets a fresh uniform value; `ε = 2^{-ℓ}`.
    SinglePoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReprogramStrategy {
    /// Query points `0..q` in phase 2; in phase 3 output 1 iff the revealed
    /// point was queried and returned the revealed new value.
    QueryKnownPoints,
    /// No phase-2 queries; output 1 iff the revealed new value has even parity.
    NoQueries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReprogrammingConfig {
    /// `ℓ`: domain bits of `F`.
    pub domain_bits: u32,
    pub range_bits: u32,
    pub q: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub set: ReprogramSet,
    pub strategy: ReprogramStrategy,
}

impl ReprogrammingConfig {
    pub fn epsilon(&self) -> f64 {
        match self.set {
            ReprogramSet::Empty => 0.0,
            ReprogramSet::SinglePoint => (-(self.domain_bits as f64)).exp2(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=32).contains(&self.domain_bits) || !(1..=32).contains(&self.range_bits) {
            return Err(Error::ParamsOutOfRange("domain and range widths must be in 1..=32".into()));
        }
        if self.trials == 0 || self.q > 1 << self.domain_bits {
            return Err(Error::ParamsOutOfRange("need trials >= 1 and q <= 2^domain_bits".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReprogrammingResult {
    pub config: ReprogrammingConfig,
    pub estimate: AdvantageEstimate,
    pub epsilon: f64,
    /// `2q√ε`.
    pub bound: f64,
    pub bound_vacuous: bool,
    pub seeds: SeedInfo,
}

fn reprogramming_trial(cfg: &ReprogrammingConfig, b: bool, seed: u64) -> bool {
    let f_seed = mix(seed, 0xF);
    let range = block_mask(cfg.range_bits);
    let f = |x: u64| mix(f_seed, x) & range;
    let mut rng = rng_for(mix(seed, 0xB));
    // The randomness of B: the point and its new value (unused when empty).
    let point = rng.random::<u64>() & block_mask(cfg.domain_bits);
    let value = rng.random::<u64>() & range;
    let reprogrammed = b && cfg.set == ReprogramSet::SinglePoint;
    let oracle = |x: u64| if reprogrammed && x == point { value } else { f(x) };
    match cfg.strategy {
        ReprogramStrategy::QueryKnownPoints => {
            let answers: Vec<u64> = (0..cfg.q).map(oracle).collect();
            cfg.set == ReprogramSet::SinglePoint && point < cfg.q && answers[point as usize] == value
        }
        ReprogramStrategy::NoQueries => value.count_ones() % 2 == 0,
    }
}

/// The reprogramming experiment with classical strategies: phase 2 queries
/// `F_b`, phase 3 sees the randomness of `B` but has no oracle.
pub fn run_reprogramming(cfg: &ReprogrammingConfig) -> Result<ReprogrammingResult> {
    cfg.validate()?;
    let world = |b: bool, stream: u64| -> u64 {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| reprogramming_trial(cfg, b, trial_seed(cfg.master_seed, stream, i)) as u64)
            .sum()
    };
    let ones_1 = world(true, REAL_STREAM);
    let ones_0 = world(false, IDEAL_STREAM);
    let epsilon = cfg.epsilon();
    let bound = bound_reprogramming(cfg.q as f64, epsilon);
    Ok(ReprogrammingResult {
        config: *cfg,
        estimate: AdvantageEstimate::from_counts(ones_1, cfg.trials, ones_0, cfg.trials),
        epsilon,
        bound,
        bound_vacuous: bound >= 1.0,
        seeds: SeedInfo::new(cfg.master_seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resampling(distribution: ResamplingDistribution, q: u64) -> ResamplingConfig {
        ResamplingConfig {
            m: 8,
            n: 8,
            q,
            trials: 400,
            master_seed: 11,
            distribution,
            phase1: if q == 0 { Phase1Strategy::Idle } else { Phase1Strategy::RandomForward },
            phase3: Phase3Strategy::RecheckRecorded,
        }
    }

    #[test]
    fn point_mass_is_detected() {
        let r = run_resampling(&resampling(ResamplingDistribution::PointMassOnQueried, 8)).unwrap();
        assert_eq!(r.estimate.advantage, 1.0);
        assert!(r.bound_vacuous);
    }

    #[test]
    fn idle_phase_one_gives_nothing() {
        let r = run_resampling(&resampling(ResamplingDistribution::Uniform, 0)).unwrap();
        assert_eq!(r.estimate.advantage, 0.0);
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn uniform_bound_value() {
        let cfg = resampling(ResamplingDistribution::Uniform, 64);
        assert_eq!(bound_resampling(8, 64.0, cfg.epsilon()), 0.125);
    }

    #[test]
    fn empty_reprogramming_is_invisible() {
        let cfg = ReprogrammingConfig {
            domain_bits: 12,
            range_bits: 12,
            q: 16,
            trials: 500,
            master_seed: 1,
            set: ReprogramSet::Empty,
            strategy: ReprogramStrategy::QueryKnownPoints,
        };
        let r = run_reprogramming(&cfg).unwrap();
        assert_eq!(r.estimate.advantage, 0.0);
        assert_eq!(r.bound, 0.0);
    }
}
