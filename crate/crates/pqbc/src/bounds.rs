//! Closed-form advantage bounds and attack tradeoff curves.
//!
//! Each bound is returned as a list of labelled terms whose sum is the
//! reported value. Labels are ASCII formulas over `q_C`, `q_Q`, `q_C'`
//! (decryption queries), `l` (blocks per query), `sigma` (total blocks), `s`
//! (tag bits), `m` and `n`. Values are `f64`; powers of two are exact, so the
//! only rounding comes from square roots and the final additions.

use crate::error::{Error, Result};
use serde::Serialize;

/// Query counts and optional mode parameters for one bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, serde::Deserialize)]
pub struct BoundQuery {
    pub m: u32,
    pub n: u32,
    pub q_c: f64,
    pub q_q: f64,
    /// Blocks in the longest query.
    pub ell: Option<f64>,
    /// Total blocks over all queries.
    pub sigma: Option<f64>,
    /// Decryption (verification) queries.
    pub q_c_dec: Option<f64>,
    /// Tag bits.
    pub s: Option<u32>,
}

impl BoundQuery {
    pub fn new(m: u32, n: u32, q_c: f64, q_q: f64) -> Self {
        Self { m, n, q_c, q_q, ..Self::default() }
    }

    pub fn with_ell(mut self, ell: f64) -> Self {
        self.ell = Some(ell);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_q_c_dec(mut self, q: f64) -> Self {
        self.q_c_dec = Some(q);
        self
    }

    pub fn with_tag_bits(mut self, s: u32) -> Self {
        self.s = Some(s);
        self
    }

    fn check(&self) -> Result<()> {
        for (name, v) in [("q_c", self.q_c), ("q_q", self.q_q)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::ParamsOutOfRange(format!("{name} must be a finite non-negative count")));
            }
        }
        for v in [self.ell, self.sigma, self.q_c_dec].into_iter().flatten() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::ParamsOutOfRange("mode parameters must be finite and non-negative".into()));
            }
        }
        Ok(())
    }

    fn ell(&self) -> Result<f64> {
        self.ell.ok_or(Error::MissingParameter("ell"))
    }

    fn sigma(&self) -> Result<f64> {
        self.sigma.ok_or(Error::MissingParameter("sigma"))
    }

    fn q_c_dec(&self) -> Result<f64> {
        self.q_c_dec.ok_or(Error::MissingParameter("q_c_dec"))
    }

    fn tag_bits(&self) -> Result<u32> {
        self.s.ok_or(Error::MissingParameter("s"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub label: &'static str,
    pub value: f64,
}

/// A named alternative form reported alongside the main bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variant {
    pub formula_id: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageBound {
    pub formula_id: &'static str,
    /// Sum of `terms`, unclamped.
    pub value: f64,
    /// `min(value, 1)`.
    pub clamped: f64,
    /// The bound says nothing (value ≥ 1).
    pub vacuous: bool,
    pub terms: Vec<Term>,
    pub variants: Vec<Variant>,
}

impl AdvantageBound {
    fn from_terms(formula_id: &'static str, terms: Vec<Term>) -> Self {
        let value = terms.iter().fold(0.0, |acc, t| acc + t.value);
        Self { formula_id, value, clamped: value.min(1.0), vacuous: value >= 1.0, terms, variants: Vec::new() }
    }

    pub fn term_labels(&self) -> Vec<&'static str> {
        self.terms.iter().map(|t| t.label).collect()
    }
}

fn t(label: &'static str, value: f64) -> Term {
    Term { label, value }
}

fn p2(e: f64) -> f64 {
    e.exp2()
}

/// `FX` in the Q1 model.
///
/// Main form: `4 q_C √q_Q / √(2^m (2^n − q_C + 1)) + 2 q_Q √q_C / √2^{m+n}`.
/// With the full codebook (`q_C = 2^n`) the bound collapses to `q_Q²/2^m`,
/// which is then the primary value. The simplified form
/// `8(q_C √q_Q + q_Q √q_C)/√2^{m+n}` is reported as a variant when
/// `q_C < (3/4)·2^n`.
pub fn bound_fx_pq(q: &BoundQuery) -> Result<AdvantageBound> {
    q.check()?;
    let (m, n) = (q.m as f64, q.n as f64);
    let full = p2(n);
    if q.q_c > full {
        return Err(Error::RegimeError(format!("q_C = {} exceeds the codebook size 2^{}", q.q_c, q.n)));
    }
    let main = AdvantageBound::from_terms(
        "fx_pq",
        vec![
            t("4*q_C*sqrt(q_Q)/sqrt(2^m*(2^n-q_C+1))", 4.0 * q.q_c * q.q_q.sqrt() / (p2(m) * (full - q.q_c + 1.0)).sqrt()),
            t("2*q_Q*sqrt(q_C)/sqrt(2^(m+n))", 2.0 * q.q_q * q.q_c.sqrt() / p2((m + n) / 2.0)),
        ],
    );
    let mut variants = Vec::new();
    if q.q_c < 0.75 * full {
        variants.push(Variant {
            formula_id: "fx_pq_simplified",
            value: 8.0 * (q.q_c * q.q_q.sqrt() + q.q_q * q.q_c.sqrt()) / p2((m + n) / 2.0),
        });
    }
    if q.q_c == full {
        let mut fc = AdvantageBound::from_terms("fx_pq_full_codebook", vec![t("q_Q^2/2^m", q.q_q * q.q_q / p2(m))]);
        fc.variants.push(Variant { formula_id: main.formula_id, value: main.value });
        return Ok(fc);
    }
    Ok(AdvantageBound { variants, ..main })
}

/// Classical FX: `q_FX · q_E / 2^{m+n}`.
pub fn bound_fx_classical(q_fx: f64, q_e: f64, m: u32, n: u32) -> AdvantageBound {
    AdvantageBound::from_terms("fx_classical", vec![t("q_FX*q_E/2^(m+n)", q_fx * q_e / p2((m + n) as f64))])
}

/// LRW via the hybrid technique: `6q_C²/2^n + 4(q_C √q_Q + q_Q √q_C)/2^{(m+n)/2}`.
pub fn bound_lrw_pq_hybrid(q: &BoundQuery) -> Result<AdvantageBound> {
    q.check()?;
    let (m, n) = (q.m as f64, q.n as f64);
    Ok(AdvantageBound::from_terms(
        "lrw_pq_hybrid",
        vec![
            t("6*q_C^2/2^n", 6.0 * q.q_c * q.q_c / p2(n)),
            t(
                "4*(q_C*sqrt(q_Q)+q_Q*sqrt(q_C))/2^((m+n)/2)",
                4.0 * (q.q_c * q.q_q.sqrt() + q.q_q * q.q_c.sqrt()) / p2((m + n) / 2.0),
            ),
        ],
    ))
}

/// LRW via the general lifting argument: `q_Q²/2^m + q_C²/2^n`.
pub fn bound_lrw_pq_general(q: &BoundQuery) -> Result<AdvantageBound> {
    q.check()?;
    Ok(AdvantageBound::from_terms(
        "lrw_pq_general",
        vec![t("q_Q^2/2^m", q.q_q * q.q_q / p2(q.m as f64)), t("q_C^2/2^n", q.q_c * q.q_c / p2(q.n as f64))],
    ))
}

/// XEX2 via the general lifting argument with the ideal-hash reduction:
/// `2q_Q²/2^m + q_C²/(2^n − 1)`.
pub fn bound_xex2_pq(q: &BoundQuery) -> Result<AdvantageBound> {
    q.check()?;
    Ok(AdvantageBound::from_terms(
        "xex2_pq",
        vec![
            t("2*q_Q^2/2^m", 2.0 * q.q_q * q.q_q / p2(q.m as f64)),
            t("q_C^2/(2^n-1)", q.q_c * q.q_c / (p2(q.n as f64) - 1.0)),
        ],
    ))
}

/// The XEX2 row of the mode summary table: `q_Q²/2^m + 3q_C²/2^n`. It differs
/// from [`bound_xex2_pq`]; both are exposed.
pub fn bound_xex2_pq_table(q: &BoundQuery) -> Result<AdvantageBound> {
    q.check()?;
    Ok(AdvantageBound::from_terms(
        "xex2_pq_table",
        vec![t("q_Q^2/2^m", q.q_q * q.q_q / p2(q.m as f64)), t("3*q_C^2/2^n", 3.0 * q.q_c * q.q_c / p2(q.n as f64))],
    ))
}

/// Classical LRW with an ε-XOR-universal hash: `Adv_E + q²ε`.
pub fn bound_lrw_classical(q: f64, eps: f64, adv_e: f64) -> AdvantageBound {
    AdvantageBound::from_terms("lrw_classical", vec![t("Adv_E", adv_e), t("q^2*eps", q * q * eps)])
}

/// Classical XEX2: `2·Adv_E + q²/(2^n − 1)`.
pub fn bound_xex2_classical(q: f64, n: u32, adv_e: f64) -> AdvantageBound {
    AdvantageBound::from_terms(
        "xex2_classical",
        vec![t("2*Adv_E", 2.0 * adv_e), t("q^2/(2^n-1)", q * q / (p2(n as f64) - 1.0))],
    )
}

/// An ideal cipher against `q_Q` quantum queries: `q_Q²/2^m`.
pub fn bound_ideal_cipher_pq(q_q: f64, m: u32) -> AdvantageBound {
    AdvantageBound::from_terms("ideal_cipher_pq", vec![t("q_Q^2/2^m", q_q * q_q / p2(m as f64))])
}

/// The lifting combinator `c·adv + δ`.
pub fn bound_lift(adv: f64, delta: f64, c: f64) -> AdvantageBound {
    AdvantageBound::from_terms("lift", vec![t("c*Adv_E", c * adv), t("delta", delta)])
}

/// Lifting in the ideal cipher model: `q_Q²/2^m + δ(q_C)`.
pub fn bound_lift_ideal_cipher(q_q: f64, m: u32, delta: f64) -> AdvantageBound {
    AdvantageBound::from_terms("lift_ideal_cipher", vec![t("q_Q^2/2^m", q_q * q_q / p2(m as f64)), t("delta", delta)])
}

/// Modes and constructions with a row in the mode summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeId {
    Cbc,
    Ecbc,
    Cmac,
    Gcm,
    GcmSst,
    Lrw,
    Xex2,
}

impl ModeId {
    pub const ALL: [ModeId; 7] = [ModeId::Cbc, ModeId::Ecbc, ModeId::Cmac, ModeId::Gcm, ModeId::GcmSst, ModeId::Lrw, ModeId::Xex2];

    pub fn name(&self) -> &'static str {
        match self {
            ModeId::Cbc => "cbc",
            ModeId::Ecbc => "ecbc",
            ModeId::Cmac => "cmac",
            ModeId::Gcm => "gcm",
            ModeId::GcmSst => "gcm-sst",
            ModeId::Lrw => "lrw",
            ModeId::Xex2 => "xex2",
        }
    }
}

/// One row of the mode summary table, term by term. CMAC's classical term is
/// evaluated with `q = q_C`.
pub fn bound_mode(mode: ModeId, q: &BoundQuery) -> Result<AdvantageBound> {
    q.check()?;
    let (m, n) = (q.m as f64, q.n as f64);
    let (qc, qq) = (q.q_c, q.q_q);
    let b = match mode {
        ModeId::Cbc => {
            let l = q.ell()?;
            AdvantageBound::from_terms(
                "mode_cbc",
                vec![t("q_Q^2*l^2/2^m", qq * qq * l * l / p2(m)), t("q_C^2*l^2/2^n", qc * qc * l * l / p2(n))],
            )
        }
        ModeId::Ecbc => {
            let l = q.ell()?;
            AdvantageBound::from_terms(
                "mode_ecbc",
                vec![
                    t("2*q_Q^2*l^2/2^m", 2.0 * qq * qq * l * l / p2(m)),
                    t("4*q_C^2*l^2/2^n", 4.0 * qc * qc * l * l / p2(n)),
                ],
            )
        }
        ModeId::Cmac => {
            let l = q.ell()?;
            AdvantageBound::from_terms(
                "mode_cmac",
                vec![
                    t("(q_Q*l+1)^2/2^m", (qq * l + 1.0).powi(2) / p2(m)),
                    t("5*(l^2+1)*q_C^2/2^n", 5.0 * (l * l + 1.0) * qc * qc / p2(n)),
                ],
            )
        }
        ModeId::Gcm => {
            let (l, sigma, qd, s) = (q.ell()?, q.sigma()?, q.q_c_dec()?, q.tag_bits()?);
            AdvantageBound::from_terms(
                "mode_gcm",
                vec![
                    t("q_Q^2*l^2/2^m", qq * qq * l * l / p2(m)),
                    t("(sigma+q_C+q_C'+1)^2/2^(n+1)", (sigma + qc + qd + 1.0).powi(2) / p2(n + 1.0)),
                    t("(sigma+q_C+q_C')/2^(n-1)", (sigma + qc + qd) / p2(n - 1.0)),
                    t("q_C'*(l+1)/2^s", qd * (l + 1.0) / p2(s as f64)),
                ],
            )
        }
        ModeId::GcmSst => {
            let (l, sigma, qd, s) = (q.ell()?, q.sigma()?, q.q_c_dec()?, q.tag_bits()?);
            AdvantageBound::from_terms(
                "mode_gcm_sst",
                vec![
                    t("q_Q^2*l^2/2^m", qq * qq * l * l / p2(m)),
                    t("(sigma+3*(q_C+q_C'))^2/2^(n+1)", (sigma + 3.0 * (qc + qd)).powi(2) / p2(n + 1.0)),
                    t("q_C'*l/2^n", qd * l / p2(n)),
                    t("q_C'/2^s", qd / p2(s as f64)),
                ],
            )
        }
        ModeId::Lrw => AdvantageBound { formula_id: "mode_lrw", ..bound_lrw_pq_general(q)? },
        ModeId::Xex2 => AdvantageBound { formula_id: "mode_xex2", ..bound_xex2_pq_table(q)? },
    };
    Ok(b)
}

/// `4√(2^n q ε)`: resampling one point of an ideal cipher.
pub fn bound_resampling(n: u32, q: f64, eps: f64) -> f64 {
    4.0 * (p2(n as f64) * q * eps).sqrt()
}

/// `2q√ε`: reprogramming a random function on a set of mass ε.
pub fn bound_reprogramming(q: f64, eps: f64) -> f64 {
    2.0 * q * eps.sqrt()
}

/// Attacks with a `(q_C, q_Q)` tradeoff curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AttackId {
    /// `q_C · q_Q = 2^{m+n}` with classical offline queries.
    Classical,
    /// `q_C = 1`, `q_Q = 2^{(m+n)/2}`.
    Grover,
    /// `q_C = 2^{n/3}`, `q_Q = 2^{m/2 + n/3}`.
    GroverBht,
    /// `q_C · q_Q^6 = 2^{3(m+n)}` with `q_C ≤ min(2^n, 2^{3(m+n)/7})`.
    Mitm,
    /// `q_C · q_Q² = 2^{m+n}` with `q_C ≤ 2^n`.
    OfflineSimon,
}

/// A point on a tradeoff curve, in log2 units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub log2_q_c: f64,
    pub log2_q_q: f64,
    /// The requested `q_C` was moved into the attack's valid range.
    pub clamped: bool,
}

/// Evaluates an attack's tradeoff at each requested `log2 q_C`. Fixed-point
/// attacks (Grover, Grover+BHT) return their single operating point for
/// every grid entry.
pub fn attack_tradeoff(attack: AttackId, m: u32, n: u32, log2_q_c: &[f64]) -> Vec<TradeoffPoint> {
    let (m, n) = (m as f64, n as f64);
    let clamp = |x: f64, hi: f64| {
        let c = x.clamp(0.0, hi);
        (c, c != x)
    };
    log2_q_c
        .iter()
        .map(|&x| match attack {
            AttackId::Classical => {
                let (c, cl) = clamp(x, n);
                TradeoffPoint { log2_q_c: c, log2_q_q: m + n - c, clamped: cl }
            }
            AttackId::Grover => TradeoffPoint { log2_q_c: 0.0, log2_q_q: (m + n) / 2.0, clamped: x != 0.0 },
            AttackId::GroverBht => {
                TradeoffPoint { log2_q_c: n / 3.0, log2_q_q: m / 2.0 + n / 3.0, clamped: x != n / 3.0 }
            }
            AttackId::Mitm => {
                let (c, cl) = clamp(x, n.min(3.0 * (m + n) / 7.0));
                TradeoffPoint { log2_q_c: c, log2_q_q: (3.0 * (m + n) - c) / 6.0, clamped: cl }
            }
            AttackId::OfflineSimon => {
                let (c, cl) = clamp(x, n);
                TradeoffPoint { log2_q_c: c, log2_q_q: (m + n - c) / 2.0, clamped: cl }
            }
        })
        .collect()
}

/// Parameter regimes compared for LRW.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `m ≥ 2n`.
    KeyMuchLonger,
    /// `q_C / q_Q ≥ 16`.
    ClassicalDominant,
    /// `q_C / q_Q ≤ 1/16`.
    QuantumDominant,
    /// Query counts within a factor 16 of each other.
    Balanced,
}

/// Ratio beyond which one query count counts as much larger than the other.
pub const REGIME_RATIO: f64 = 16.0;

pub fn select_regime(m: u32, n: u32, q_c: f64, q_q: f64) -> Regime {
    if m >= 2 * n {
        Regime::KeyMuchLonger
    } else if q_c >= REGIME_RATIO * q_q {
        Regime::ClassicalDominant
    } else if q_q >= REGIME_RATIO * q_c {
        Regime::QuantumDominant
    } else {
        Regime::Balanced
    }
}

/// Leading-order LRW bounds in one regime: classical, general-lifting and
/// hybrid-technique columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeComparison {
    pub regime: Regime,
    pub classical: f64,
    pub general: f64,
    pub hybrid: f64,
}

/// Leading-order comparison for LRW. In the balanced regime `q` is taken as
/// `max(q_C, q_Q)`.
pub fn regime_comparison(m: u32, n: u32, q_c: f64, q_q: f64) -> RegimeComparison {
    let regime = select_regime(m, n, q_c, q_q);
    let (m, n) = (m as f64, n as f64);
    let half = p2((m + n) / 2.0);
    let (classical, general, hybrid) = match regime {
        Regime::KeyMuchLonger | Regime::ClassicalDominant => {
            let v = q_c * q_c / p2(n);
            (v, v, v)
        }
        Regime::QuantumDominant => (q_q / p2(m), q_q * q_q / p2(m), q_q * q_c.sqrt() / half),
        Regime::Balanced => {
            let q = q_c.max(q_q);
            (q * q / p2(n) + q / p2(m), q * q / p2(n) + q * q / p2(m), q * q / p2(n) + q.powf(1.5) / half)
        }
    };
    RegimeComparison { regime, classical, general, hybrid }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_queries_give_zero() {
        let q = BoundQuery::new(12, 12, 0.0, 0.0).with_ell(4.0).with_sigma(0.0).with_q_c_dec(0.0).with_tag_bits(8);
        assert_eq!(bound_fx_pq(&q).unwrap().value, 0.0);
        assert_eq!(bound_lrw_pq_hybrid(&q).unwrap().value, 0.0);
        for mode in [ModeId::Cbc, ModeId::Ecbc, ModeId::Lrw, ModeId::Xex2] {
            assert_eq!(bound_mode(mode, &q).unwrap().value, 0.0);
        }
    }

    #[test]
    fn fx_regimes() {
        let full = BoundQuery::new(10, 8, 256.0, 7.0);
        let b = bound_fx_pq(&full).unwrap();
        assert_eq!(b.value, 49.0 / 1024.0);
        assert_eq!(b.formula_id, "fx_pq_full_codebook");
        assert!(matches!(bound_fx_pq(&BoundQuery::new(10, 8, 257.0, 1.0)), Err(Error::RegimeError(_))));
        let small = bound_fx_pq(&BoundQuery::new(12, 12, 4.0, 16.0)).unwrap();
        assert_eq!(small.variants[0].formula_id, "fx_pq_simplified");
    }

    #[test]
    fn fx_classical_examples() {
        assert_eq!(bound_fx_classical(16.0, 16.0, 8, 8).value, 1.0 / 256.0);
        assert_eq!(bound_fx_classical(256.0, 256.0, 8, 8).value, 1.0);
    }

    #[test]
    fn lrw_hybrid_example() {
        let b = bound_lrw_pq_hybrid(&BoundQuery::new(16, 16, 256.0, 256.0)).unwrap();
        assert_eq!(b.value, 6.5);
        assert!(b.vacuous);
        assert_eq!(b.clamped, 1.0);
    }

    #[test]
    fn missing_mode_parameters() {
        let q = BoundQuery::new(8, 8, 1.0, 1.0);
        assert_eq!(bound_mode(ModeId::Cbc, &q), Err(Error::MissingParameter("ell")));
        let q = q.with_ell(1.0);
        assert_eq!(bound_mode(ModeId::Gcm, &q), Err(Error::MissingParameter("sigma")));
    }

    #[test]
    fn resampling_example() {
        assert_eq!(bound_resampling(8, 64.0, (-24f64).exp2()), 0.125);
        assert_eq!(bound_reprogramming(0.0, 0.5), 0.0);
    }

    #[test]
    fn offline_simon_balance() {
        let p = attack_tradeoff(AttackId::OfflineSimon, 12, 12, &[8.0]);
        assert_eq!(p[0].log2_q_q, 8.0);
        let mitm = attack_tradeoff(AttackId::Mitm, 10, 10, &[20.0]);
        assert!(mitm[0].clamped);
        assert!((mitm[0].log2_q_c - 60.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn regimes() {
        assert_eq!(select_regime(40, 16, 1.0, 1.0), Regime::KeyMuchLonger);
        assert_eq!(select_regime(16, 16, 1024.0, 2.0), Regime::ClassicalDominant);
        assert_eq!(select_regime(16, 16, 2.0, 1024.0), Regime::QuantumDominant);
        assert_eq!(select_regime(16, 16, 100.0, 200.0), Regime::Balanced);
    }
}
