//! Frozen values from an independent arbitrary-precision evaluator
//! (`tools/gen_fixtures.py`), compared against the library.

use pqbc::bounds::{self, BoundQuery, ModeId};
use pqbc::experiments::clopper_pearson;
use pqbc::gf2n::FieldSpec;
use pqbc::qsim::grover_success_probability;

const BOUND_REL_TOL: f64 = 1e-12;
const CP_ABS_TOL: f64 = 1e-9;
const GROVER_ABS_TOL: f64 = 1e-12;

fn rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).map(|l| l.split('\t').collect())
}

fn hex(s: &str) -> u64 {
    u64::from_str_radix(s.trim_start_matches("0x"), 16).expect("hex field")
}

fn hex128(s: &str) -> u128 {
    u128::from_str_radix(s.trim_start_matches("0x"), 16).expect("hex field")
}

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn bounds_match_oracle() {
    let text = include_str!("data/bounds.tsv");
    let mut checked = 0;
    for r in rows(text) {
        let num = |i: usize| r[i].parse::<f64>().expect("numeric field");
        let (m, n) = (num(1) as u32, num(2) as u32);
        let (qc, qq) = (num(3), num(4));
        let want = num(9);
        let base = BoundQuery::new(m, n, qc, qq);
        let with_mode = || base.with_ell(num(5)).with_sigma(num(6)).with_q_c_dec(num(7)).with_tag_bits(num(8) as u32);
        let got = match r[0] {
            "fx" => bounds::bound_fx_pq(&base).unwrap().value,
            "lrw-hybrid" => bounds::bound_lrw_pq_hybrid(&base).unwrap().value,
            "lrw-general" => bounds::bound_lrw_pq_general(&base).unwrap().value,
            "xex2" => bounds::bound_xex2_pq(&base).unwrap().value,
            "xex2-table" => bounds::bound_xex2_pq_table(&base).unwrap().value,
            "resampling" => bounds::bound_resampling(n, qc, num(8)),
            "reprogramming" => bounds::bound_reprogramming(qc, num(8)),
            mode => {
                let id = ModeId::ALL
                    .into_iter()
                    .find(|id| mode.strip_prefix("mode-") == Some(id.name()))
                    .unwrap_or_else(|| panic!("unknown formula {mode}"));
                bounds::bound_mode(id, &with_mode()).unwrap().value
            }
        };
        assert!(close(got, want, BOUND_REL_TOL), "{}: got {got}, want {want}", r.join(" "));
        checked += 1;
    }
    assert!(checked > 2500, "only {checked} rows");
}

#[test]
fn field_arithmetic_matches_oracle() {
    let text = include_str!("data/gf2n.tsv");
    let mut checked = 0;
    for r in rows(text) {
        let n: u32 = r[0].parse().unwrap();
        let f = FieldSpec::new(n, hex128(r[1])).unwrap();
        assert_eq!(f, FieldSpec::canonical(n).unwrap(), "canonical modulus for n={n}");
        let (a, b) = (hex(r[2]), hex(r[3]));
        assert_eq!(f.mul(a, b), hex(r[4]), "{a:#x}*{b:#x} in GF(2^{n})");
        assert_eq!(f.inv(a).unwrap(), hex(r[5]), "inverse of {a:#x} in GF(2^{n})");
        let j: u64 = r[6].parse().unwrap();
        assert_eq!(f.pow(a, j), hex(r[7]), "{a:#x}^{j} in GF(2^{n})");
        checked += 1;
    }
    assert!(checked > 150);
}

#[test]
fn statistics_match_oracle() {
    let text = include_str!("data/stats.tsv");
    let (mut cp, mut grover) = (0, 0);
    for r in rows(text) {
        match r[0] {
            "cp" => {
                let (k, n): (u64, u64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
                let conf: f64 = r[3].parse().unwrap();
                let (lo, hi) = clopper_pearson(k, n, conf);
                let (wlo, whi): (f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap());
                assert!((lo - wlo).abs() <= CP_ABS_TOL, "cp {k}/{n}@{conf} low {lo} vs {wlo}");
                assert!((hi - whi).abs() <= CP_ABS_TOL, "cp {k}/{n}@{conf} high {hi} vs {whi}");
                cp += 1;
            }
            "grover" => {
                let (w, t): (u32, u64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
                let want: f64 = r[4].parse().unwrap();
                let got = grover_success_probability(w, 1, t);
                assert!((got - want).abs() <= GROVER_ABS_TOL, "grover w={w} t={t}: {got} vs {want}");
                grover += 1;
            }
            other => panic!("unknown row kind {other}"),
        }
    }
    assert!(cp > 5 && grover > 5);
}
