//! Property tests for field arithmetic, ciphers, constructions, bounds and
//! the experiment statistics.

use pqbc::bounds::{self, AdvantageBound, AttackId, BoundQuery, ModeId};
use pqbc::cipher::{is_bijection, swap_apply, CipherFamily, CipherParams, IdealCipher, Permutation, ResampledCipher};
use pqbc::constructions::*;
use pqbc::experiments::{clopper_pearson, AdvantageEstimate};
use pqbc::gf2n::FieldSpec;
use proptest::prelude::*;

/// Relative slack for comparing sums of non-negative terms.
const SUM_REL_TOL: f64 = 1e-12;

fn field_and_elems() -> impl Strategy<Value = (FieldSpec, u64, u64, u64)> {
    (2u32..=63).prop_flat_map(|n| {
        let f = FieldSpec::canonical(n).unwrap();
        let mask = f.mask();
        (Just(f), any::<u64>().prop_map(move |a| a & mask), any::<u64>().prop_map(move |b| b & mask), any::<u64>().prop_map(move |c| c & mask))
    })
}

/// Bounds with no constant term: zero queries give zero advantage.
fn zero_at_origin(q: &BoundQuery) -> Vec<AdvantageBound> {
    let q_mode = q.with_ell(4.0).with_sigma(4.0 * q.q_c).with_q_c_dec(0.0).with_tag_bits(q.n);
    let mut v = vec![
        bounds::bound_fx_pq(q).unwrap(),
        bounds::bound_lrw_pq_hybrid(q).unwrap(),
        bounds::bound_lrw_pq_general(q).unwrap(),
        bounds::bound_xex2_pq(q).unwrap(),
        bounds::bound_xex2_pq_table(q).unwrap(),
    ];
    for id in [ModeId::Cbc, ModeId::Ecbc, ModeId::GcmSst, ModeId::Lrw, ModeId::Xex2] {
        v.push(bounds::bound_mode(id, &q_mode).unwrap());
    }
    v
}

/// Every bound family at one query point, with mode parameters fixed.
fn all_bounds(q: &BoundQuery) -> Vec<AdvantageBound> {
    let q_mode = q.with_ell(4.0).with_sigma(64.0).with_q_c_dec(2.0).with_tag_bits(8);
    let mut v = vec![
        bounds::bound_lrw_pq_hybrid(q).unwrap(),
        bounds::bound_lrw_pq_general(q).unwrap(),
        bounds::bound_xex2_pq(q).unwrap(),
        bounds::bound_xex2_pq_table(q).unwrap(),
    ];
    if q.q_c < (q.n as f64).exp2() {
        v.push(bounds::bound_fx_pq(q).unwrap());
    }
    for id in ModeId::ALL {
        v.push(bounds::bound_mode(id, &q_mode).unwrap());
    }
    v
}

proptest! {
    #[test]
    fn field_axioms((f, a, b, c) in field_and_elems()) {
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        prop_assert_eq!(f.mul(a, 1), a);
        prop_assert_eq!(f.double(a), f.mul(a, 2));
        prop_assert_eq!(f.pow(a, 3), f.mul(a, f.mul(a, a)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        } else {
            prop_assert!(f.inv(0).is_err());
        }
    }

    #[test]
    fn swap_is_an_involution(a in 0u64..256, b in 0u64..256, x in 0u64..256) {
        prop_assert_eq!(swap_apply(a, b, swap_apply(a, b, x)), x);
        prop_assert_eq!(swap_apply(a, b, a), b);
    }

    #[test]
    fn shuffled_permutations_invert(n in 1u32..=10, seed in any::<u64>(), x in any::<u64>()) {
        let p = Permutation::shuffled(n, seed).unwrap();
        let x = x & ((1 << n) - 1);
        prop_assert_eq!(p.invert(p.apply(x)), x);
        prop_assert_eq!(p.inverse().apply(p.apply(x)), x);
    }

    #[test]
    fn resampled_cipher_stays_a_permutation(seed in any::<u64>(), k0 in 0u64..16, s0 in 0u64..64, s1 in 0u64..64, k in 0u64..16) {
        let base = IdealCipher::new(CipherParams::new(4, 6, seed)).unwrap();
        let r = ResampledCipher::new(&base, k0, s0, s1);
        prop_assert!(is_bijection(&r, k));
        if k != k0 {
            prop_assert!((0..64).all(|x| r.enc(k, x) == base.enc(k, x)));
        } else {
            prop_assert_eq!(r.enc(k, s0), base.enc(k, s1));
        }
    }

    #[test]
    fn constructions_round_trip(
        seed in any::<u64>(),
        n in 3u32..=12,
        k in any::<u64>(),
        k1 in any::<u64>(),
        k2 in any::<u64>(),
        tweak in any::<u64>(),
        j in 0u64..1000,
        x in any::<u64>(),
    ) {
        let m = 6;
        let e = IdealCipher::new(CipherParams::new(m, n, seed)).unwrap();
        let f = FieldSpec::canonical(n).unwrap();
        let (mk, mb) = ((1u64 << m) - 1, f.mask());
        let (k, x) = (k & mk, x & mb);

        let fx = FxKey::new(k, k1 & mb, k2 & mb);
        prop_assert_eq!(fx_dec(&e, &fx, fx_enc(&e, &fx, x).unwrap()).unwrap(), x);
        prop_assert_eq!(fx_tilde_dec(&e, &fx, fx_tilde_enc(&e, &fx, x).unwrap()).unwrap(), x);

        let h = MultiplicativeHash::new(f);
        let tw = (tweak & mb).max(1);
        let lk = LrwKey { k, k_prime: k1 & mb };
        prop_assert_eq!(lrw_dec(&e, &h, &lk, tw, lrw_enc(&e, &h, &lk, tw, x).unwrap()).unwrap(), x);

        let xk = Xex2Key::new(k, k2 & mk, 2).unwrap();
        let t = TweakXex::new(tweak & mb, j).unwrap();
        prop_assert_eq!(xex2_dec(&e, &f, &xk, t, xex2_enc(&e, &f, &xk, t, x).unwrap()).unwrap(), x);
        prop_assert_eq!(TweakXex::from_code(t.code()).unwrap(), t);
    }

    #[test]
    fn bounds_vanish_without_queries(m in 1u32..=256, n in 2u32..=128) {
        for b in zero_at_origin(&BoundQuery::new(m, n, 0.0, 0.0)) {
            prop_assert_eq!(b.value, 0.0, "{}", b.formula_id);
        }
    }

    #[test]
    fn bounds_are_sums_of_terms(m in 1u32..=128, n in 2u32..=64, lc in 0.0f64..30.0, lq in 0.0f64..30.0) {
        let q = BoundQuery::new(m, n, lc.exp2().min((n as f64).exp2() - 1.0), lq.exp2());
        for b in all_bounds(&q) {
            let s: f64 = b.terms.iter().map(|t| t.value).sum();
            prop_assert!((s - b.value).abs() <= SUM_REL_TOL * b.value.max(f64::MIN_POSITIVE), "{}", b.formula_id);
            prop_assert!(b.terms.iter().all(|t| t.value >= 0.0));
            prop_assert_eq!(b.clamped, b.value.min(1.0));
            prop_assert_eq!(b.vacuous, b.value >= 1.0);
        }
    }

    #[test]
    fn bounds_are_monotone(
        m in 1u32..=128,
        n in 2u32..=64,
        lc in 0.0f64..30.0,
        lq in 0.0f64..30.0,
        dc in 0.0f64..4.0,
        dq in 0.0f64..4.0,
    ) {
        let cap = (n as f64).exp2() - 1.0;
        let qc0 = lc.exp2().min(cap);
        let qc1 = (lc + dc).exp2().min(cap);
        let lo = all_bounds(&BoundQuery::new(m, n, qc0, lq.exp2()));
        let hi = all_bounds(&BoundQuery::new(m, n, qc1, (lq + dq).exp2()));
        prop_assert_eq!(lo.len(), hi.len());
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(a.value <= b.value * (1.0 + SUM_REL_TOL), "{}: {} > {}", a.formula_id, a.value, b.value);
        }
    }

    #[test]
    fn tradeoff_curves_hold(m in 8u32..=256, n in 8u32..=128, x in -10.0f64..200.0) {
        let (mf, nf) = (m as f64, n as f64);
        let pt = |a| bounds::attack_tradeoff(a, m, n, &[x])[0];
        let c = pt(AttackId::Classical);
        prop_assert!((c.log2_q_c + c.log2_q_q - (mf + nf)).abs() < 1e-9);
        prop_assert!(c.log2_q_c >= 0.0 && c.log2_q_c <= nf);
        let s = pt(AttackId::OfflineSimon);
        prop_assert!((s.log2_q_c + 2.0 * s.log2_q_q - (mf + nf)).abs() < 1e-9);
        let t = pt(AttackId::Mitm);
        prop_assert!((t.log2_q_c + 6.0 * t.log2_q_q - 3.0 * (mf + nf)).abs() < 1e-9);
        prop_assert!(t.log2_q_c <= nf.min(3.0 * (mf + nf) / 7.0) + 1e-12);
        prop_assert_eq!(pt(AttackId::Grover).log2_q_q, (mf + nf) / 2.0);
        prop_assert_eq!(c.clamped, x < 0.0 || x > nf);
    }

    #[test]
    fn clopper_pearson_contains_estimate(n in 1u64..5000, frac in 0.0f64..=1.0, conf in 0.5f64..0.9999) {
        let k = ((n as f64) * frac).round() as u64;
        let (lo, hi) = clopper_pearson(k, n, conf);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0, "{lo} {p} {hi}");
    }

    #[test]
    fn advantage_interval_brackets_estimate(t in 1u64..5000, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (ra, ib) = (((t as f64) * a) as u64, ((t as f64) * b) as u64);
        let est = AdvantageEstimate::from_counts(ra, t, ib, t);
        prop_assert!(est.ci_low <= est.advantage + 1e-15 && est.advantage <= est.ci_high + 1e-15, "{est:?}");
        prop_assert!(est.ci_low >= 0.0 && est.ci_high <= 1.0);
    }
}
