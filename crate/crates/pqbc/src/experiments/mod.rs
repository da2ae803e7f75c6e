//! Monte Carlo security experiments.
//!
//! Every harness runs two independent trial pools of equal size, one per
//! world, with per-trial seeds `mix(mix(master, stream), i)`. The streams are
//! [`REAL_STREAM`] and [`IDEAL_STREAM`], so the pools never share randomness
//! and a rerun with the same master seed reproduces every number.
//!
//! Intervals are exact binomial (Clopper-Pearson) at 99.5% per world; their
//! difference is a conservative 99% interval on the advantage.

mod hybrids;
mod resampling;
mod universality;

pub use hybrids::{
    bad_event, bad_rate, check_instance, verify_hybrids, BadRate, ChiSquareSummary, HybridConstruction, HybridParams,
    HybridReport, InstanceOutcome, StepDirection,
};
pub use resampling::{
    run_reprogramming, run_resampling, Phase1Strategy, Phase3Strategy, ReprogramSet, ReprogramStrategy,
    ReprogrammingConfig, ReprogrammingResult, ResamplingConfig, ResamplingDistribution, ResamplingResult,
};
pub use universality::{multiplicative_hash_universality, xex2_ideal_hash_universality, UniversalityReport};

use crate::attacks::{birthday_distinguisher, em_distinguisher, HashKind, Verdict, DEFAULT_ALPHA, EM_MAX_VERIFICATIONS};
use crate::bounds::{bound_fx_pq, bound_lrw_pq_general, bound_lrw_pq_hybrid, bound_xex2_pq, AdvantageBound, BoundQuery};
use crate::cipher::{block_mask, mix, rng_for, CipherFamily, CipherParams, IdealCipher};
use crate::constructions::{
    Counted, FxCipher, FxKey, IdealTweakable, LrwCipher, LrwKey, MultiplicativeHash, TweakXex, TweakableCipher,
    Xex2Cipher, Xex2Key,
};
use crate::error::{Error, Result};
use crate::gf2n::FieldSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use std::time::Instant;

/// Stream label for real-world (or `b = 1`) trial seeds.
pub const REAL_STREAM: u64 = 0x5EA1;
/// Stream label for ideal-world (or `b = 0`) trial seeds.
pub const IDEAL_STREAM: u64 = 0x1DEA;
/// Per-world confidence level; two of them give a joint 99% interval.
pub const WORLD_CONFIDENCE: f64 = 0.995;

/// Seed of trial `i` in the given stream.
pub fn trial_seed(master: u64, stream: u64, i: u64) -> u64 {
    mix(mix(master, stream), i)
}

/// Exact two-sided binomial interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(n > 0 && k <= n, "clopper_pearson needs 0 <= k <= n, n > 0");
    let alpha = 1.0 - confidence;
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(k as f64, (n - k + 1) as f64).expect("positive shapes").inverse_cdf(alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64).expect("positive shapes").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Empirical rates in the two worlds and the derived advantage interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvantageEstimate {
    pub p_real: f64,
    pub p_ideal: f64,
    pub advantage: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials_real: u64,
    pub trials_ideal: u64,
    pub ones_real: u64,
    pub ones_ideal: u64,
}

impl AdvantageEstimate {
    pub fn from_counts(ones_real: u64, trials_real: u64, ones_ideal: u64, trials_ideal: u64) -> Self {
        let p_real = ones_real as f64 / trials_real as f64;
        let p_ideal = ones_ideal as f64 / trials_ideal as f64;
        let (rl, rh) = clopper_pearson(ones_real, trials_real, WORLD_CONFIDENCE);
        let (il, ih) = clopper_pearson(ones_ideal, trials_ideal, WORLD_CONFIDENCE);
        let advantage = (p_real - p_ideal).abs();
        let ci_low = (rl - ih).max(il - rh).max(0.0);
        let ci_high = (rh - il).max(ih - rl).min(1.0);
        Self { p_real, p_ideal, advantage, ci_low, ci_high, trials_real, trials_ideal, ones_real, ones_ideal }
    }
}

/// The keyed construction behind the real-world oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionId {
    Fx,
    Lrw,
    Xex2,
}

/// Classical distinguishers available to [`run_distinguishing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DistinguisherId {
    /// Always outputs 1.
    ConstantOne,
    /// Always outputs 0.
    ConstantZero,
    /// Birthday collision distinguisher with `q_C` online queries (LRW, XEX2).
    Birthday,
    /// Even-Mansour distinguisher with `q_C` online queries in total (LRW, XEX2).
    EvenMansour,
    /// FX only: two online queries, then `q_Q/2` guesses of `(k0, k1)`, each
    /// checked with two cipher queries against the observed output difference.
    KeyGuess,
}

/// Which closed-form bound an experiment is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFormula {
    FxPq,
    LrwHybrid,
    LrwGeneral,
    Xex2Pq,
}

impl BoundFormula {
    pub fn default_for(c: ConstructionId) -> Self {
        match c {
            ConstructionId::Fx => BoundFormula::FxPq,
            ConstructionId::Lrw => BoundFormula::LrwHybrid,
            ConstructionId::Xex2 => BoundFormula::Xex2Pq,
        }
    }

    pub fn evaluate(&self, q: &BoundQuery) -> Result<AdvantageBound> {
        match self {
            BoundFormula::FxPq => bound_fx_pq(q),
            BoundFormula::LrwHybrid => bound_lrw_pq_hybrid(q),
            BoundFormula::LrwGeneral => bound_lrw_pq_general(q),
            BoundFormula::Xex2Pq => bound_xex2_pq(q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub construction: ConstructionId,
    pub distinguisher: DistinguisherId,
    pub m: u32,
    pub n: u32,
    pub trials: u64,
    pub master_seed: u64,
    /// Online construction queries.
    pub q_c: u64,
    /// Offline cipher queries; classical here, counted against the quantum
    /// budget of the bound.
    pub q_q: u64,
    pub bound_formula: BoundFormula,
}

impl ExperimentConfig {
    pub fn new(construction: ConstructionId, distinguisher: DistinguisherId, m: u32, n: u32) -> Self {
        Self {
            construction,
            distinguisher,
            m,
            n,
            trials: 200,
            master_seed: 0,
            q_c: 0,
            q_q: 0,
            bound_formula: BoundFormula::default_for(construction),
        }
    }

    pub fn with_budgets(mut self, q_c: u64, q_q: u64) -> Self {
        self.q_c = q_c;
        self.q_q = q_q;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_bound(mut self, f: BoundFormula) -> Self {
        self.bound_formula = f;
        self
    }

    pub fn bound(&self) -> Result<AdvantageBound> {
        self.bound_formula.evaluate(&BoundQuery::new(self.m, self.n, self.q_c as f64, self.q_q as f64))
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ParamsOutOfRange("trials must be at least 1".into()));
        }
        CipherParams::new(self.m, self.n, 0).validate()?;
        let tweakable = matches!(self.construction, ConstructionId::Lrw | ConstructionId::Xex2);
        match self.distinguisher {
            DistinguisherId::Birthday | DistinguisherId::EvenMansour if !tweakable => Err(Error::ParamsOutOfRange(
                "birthday and Even-Mansour distinguishers need a tweakable construction".into(),
            )),
            DistinguisherId::KeyGuess if self.construction != ConstructionId::Fx => {
                Err(Error::ParamsOutOfRange("the key-guess distinguisher targets FX".into()))
            }
            DistinguisherId::KeyGuess if self.q_c < 2 => {
                Err(Error::ParamsOutOfRange("the key-guess distinguisher needs q_C >= 2".into()))
            }
            DistinguisherId::EvenMansour if self.q_c < 2 * EM_MAX_VERIFICATIONS as u64 + 4 => Err(
                Error::ParamsOutOfRange(format!("Even-Mansour needs q_C >= {}", 2 * EM_MAX_VERIFICATIONS + 4)),
            ),
            DistinguisherId::Birthday if self.q_c < 4 => {
                Err(Error::ParamsOutOfRange("the birthday distinguisher needs q_C >= 4".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Seed bookkeeping of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedInfo {
    pub master: u64,
    pub real_stream: u64,
    pub ideal_stream: u64,
}

impl SeedInfo {
    pub fn new(master: u64) -> Self {
        Self { master, real_stream: REAL_STREAM, ideal_stream: IDEAL_STREAM }
    }
}

/// The serialized result of one distinguishing experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub p_real: f64,
    pub p_ideal: f64,
    pub advantage: f64,
    pub ci: [f64; 2],
    pub bound: f64,
    pub bound_vacuous: bool,
    pub seeds: SeedInfo,
    /// Wall-clock time; only filled in when timing is requested, so default
    /// output stays byte-identical across runs.
    pub runtime_ms: Option<u64>,
    #[serde(skip)]
    pub estimate: AdvantageEstimate,
}

impl ExperimentResult {
    /// The upper confidence limit respects the bound (always true when the
    /// bound is vacuous).
    pub fn bound_respected(&self) -> bool {
        self.bound_vacuous || self.ci[1] <= self.bound
    }
}

fn tweak_pair(c: ConstructionId, field: &FieldSpec, rng: &mut ChaCha8Rng) -> Result<(u64, u64)> {
    Ok(match c {
        ConstructionId::Xex2 => {
            let i = rng.random::<u64>() & field.mask() & 0xFFFF_FFFF;
            (TweakXex::new(i, 0)?.code(), TweakXex::new(i, 1)?.code())
        }
        _ => (1, 2),
    })
}

/// Runs the configured distinguisher once; `true` means it output 1.
fn run_once<O: TweakableCipher>(
    cfg: &ExperimentConfig,
    oracle: &O,
    e: &IdealCipher,
    field: &FieldSpec,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let budgeted = Counted::with_budget(oracle, cfg.q_c);
    let out = match cfg.distinguisher {
        DistinguisherId::ConstantOne => true,
        DistinguisherId::ConstantZero => false,
        DistinguisherId::Birthday => {
            let kind = match cfg.construction {
                ConstructionId::Xex2 => HashKind::Xex2 { field: *field, alpha: DEFAULT_ALPHA },
                _ => HashKind::Multiplicative(*field),
            };
            birthday_distinguisher(&budgeted, cfg.q_c, &kind, rng)?.verdict == Verdict::Real
        }
        DistinguisherId::EvenMansour => {
            let tweaks = tweak_pair(cfg.construction, field, rng)?;
            let evals = (cfg.q_c - 2 * EM_MAX_VERIFICATIONS as u64) / 2;
            em_distinguisher(&budgeted, evals, tweaks, rng)?.verdict == Verdict::Real
        }
        DistinguisherId::KeyGuess => {
            let n = cfg.n;
            let mask = block_mask(n);
            let d = budgeted.encrypt(0, 0)? ^ budgeted.encrypt(0, 1)?;
            let mut hit = false;
            for _ in 0..cfg.q_q / 2 {
                let k0 = rng.random::<u64>() & block_mask(cfg.m);
                let k1 = rng.random::<u64>() & mask;
                if e.enc(k0, k1) ^ e.enc(k0, 1 ^ k1) == d {
                    hit = true;
                }
            }
            hit
        }
    };
    Ok(out)
}

fn trial(cfg: &ExperimentConfig, real: bool, seed: u64) -> Result<bool> {
    let (m, n) = (cfg.m, cfg.n);
    let e = IdealCipher::new(CipherParams::new(m, n, mix(seed, 0xC1)))?;
    let mut rng = rng_for(mix(seed, 0x7E57));
    let field = FieldSpec::canonical(n)?;
    if !real {
        let ideal = IdealTweakable::new(n, mix(seed, 0x1DEA))?;
        return run_once(cfg, &ideal, &e, &field, &mut rng);
    }
    let k = rng.random::<u64>() & block_mask(m);
    match cfg.construction {
        ConstructionId::Fx => {
            let key = FxKey::new(k, rng.random::<u64>() & block_mask(n), rng.random::<u64>() & block_mask(n));
            run_once(cfg, &FxCipher { cipher: &e, key }, &e, &field, &mut rng)
        }
        ConstructionId::Lrw => {
            let k_prime = rng.random_range(1..=block_mask(n));
            let o = LrwCipher { cipher: &e, hash: MultiplicativeHash::new(field), key: LrwKey { k, k_prime } };
            run_once(cfg, &o, &e, &field, &mut rng)
        }
        ConstructionId::Xex2 => {
            let k_prime = rng.random::<u64>() & block_mask(m);
            let o = Xex2Cipher { cipher: &e, field, key: Xex2Key::new(k, k_prime, DEFAULT_ALPHA)? };
            run_once(cfg, &o, &e, &field, &mut rng)
        }
    }
}

fn count_ones(results: Vec<Result<bool>>) -> Result<u64> {
    let mut ones = 0;
    for r in results {
        ones += r? as u64;
    }
    Ok(ones)
}

/// Real-versus-ideal distinguishing experiment.
pub fn run_distinguishing(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let bound = cfg.bound()?;
    let run_world = |real: bool, stream: u64| -> Result<u64> {
        let results: Vec<Result<bool>> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| trial(cfg, real, trial_seed(cfg.master_seed, stream, i)))
            .collect();
        count_ones(results)
    };
    let ones_real = run_world(true, REAL_STREAM)?;
    let ones_ideal = run_world(false, IDEAL_STREAM)?;
    let estimate = AdvantageEstimate::from_counts(ones_real, cfg.trials, ones_ideal, cfg.trials);
    Ok(ExperimentResult {
        config: *cfg,
        p_real: estimate.p_real,
        p_ideal: estimate.p_ideal,
        advantage: estimate.advantage,
        ci: [estimate.ci_low, estimate.ci_high],
        bound: bound.value,
        bound_vacuous: bound.vacuous,
        seeds: SeedInfo::new(cfg.master_seed),
        runtime_ms: None,
        estimate,
    })
}

/// [`run_distinguishing`] with `runtime_ms` filled in.
pub fn run_distinguishing_timed(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let start = Instant::now();
    let mut r = run_distinguishing(cfg)?;
    r.runtime_ms = Some(start.elapsed().as_millis() as u64);
    Ok(r)
}

/// The shipped bound-domination suite. One Even-Mansour entry is evaluated
/// under both LRW bounds; the hybrid one is vacuous at that budget.
pub fn shipped_domination_configs(trials: u64, seed: u64) -> Vec<ExperimentConfig> {
    use ConstructionId as C;
    use DistinguisherId as D;
    let base = |c, d, m, n, qc, qq| ExperimentConfig::new(c, d, m, n).with_budgets(qc, qq).with_trials(trials).with_seed(seed);
    vec![
        base(C::Fx, D::KeyGuess, 12, 12, 4, 16),
        base(C::Fx, D::ConstantOne, 12, 12, 4, 16),
        base(C::Lrw, D::Birthday, 8, 16, 64, 0),
        base(C::Lrw, D::EvenMansour, 8, 16, 128, 0).with_bound(BoundFormula::LrwGeneral),
        base(C::Lrw, D::EvenMansour, 8, 16, 128, 0),
        base(C::Xex2, D::Birthday, 8, 16, 128, 0),
        base(C::Xex2, D::EvenMansour, 8, 16, 128, 0),
    ]
}

/// One flat CSV row per experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub construction: ConstructionId,
    pub distinguisher: DistinguisherId,
    pub m: u32,
    pub n: u32,
    pub q_c: u64,
    pub q_q: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub p_real: f64,
    pub p_ideal: f64,
    pub advantage: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound_formula: BoundFormula,
    pub bound: f64,
    pub bound_vacuous: bool,
}

impl From<&ExperimentResult> for ExperimentRow {
    fn from(r: &ExperimentResult) -> Self {
        let c = &r.config;
        Self {
            construction: c.construction,
            distinguisher: c.distinguisher,
            m: c.m,
            n: c.n,
            q_c: c.q_c,
            q_q: c.q_q,
            trials: c.trials,
            master_seed: c.master_seed,
            p_real: r.p_real,
            p_ideal: r.p_ideal,
            advantage: r.advantage,
            ci_low: r.ci[0],
            ci_high: r.ci[1],
            bound_formula: c.bound_formula,
            bound: r.bound,
            bound_vacuous: r.bound_vacuous,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_edges() {
        let (lo, hi) = clopper_pearson(0, 100, 0.99);
        assert_eq!(lo, 0.0);
        // 1 - 0.005^(1/100)
        assert!((hi - 0.051_604).abs() < 1e-5, "{hi}");
        let (lo, hi) = clopper_pearson(100, 100, 0.99);
        assert_eq!(hi, 1.0);
        assert!((lo - (1.0 - 0.051_604)).abs() < 1e-5);
    }

    #[test]
    fn constant_distinguisher_has_zero_advantage() {
        let cfg = ExperimentConfig::new(ConstructionId::Lrw, DistinguisherId::ConstantOne, 8, 8)
            .with_budgets(4, 0)
            .with_trials(20);
        let r = run_distinguishing(&cfg).unwrap();
        assert_eq!(r.advantage, 0.0);
        assert_eq!(r.ci[0], 0.0);
    }

    #[test]
    fn mismatched_distinguisher_rejected() {
        let cfg = ExperimentConfig::new(ConstructionId::Fx, DistinguisherId::Birthday, 8, 8).with_budgets(16, 0);
        assert!(matches!(run_distinguishing(&cfg), Err(Error::ParamsOutOfRange(_))));
    }
}
