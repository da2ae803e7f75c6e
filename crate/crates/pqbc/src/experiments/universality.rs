//! Exhaustive XOR-universality counts for the two tweak hashes.
//!
//! For every pair of distinct inputs and every target `z`, count the keys
//! (or permutations) with `h(a) ⊕ h(b) = z`. The family is ε-XOR-universal
//! with `ε = max count / number of keys`.

use crate::cipher::Permutation;
use crate::constructions::{HashFamily, MultiplicativeHash, TweakXex, Xex2HashFamily};
use crate::error::{Error, Result};
use crate::gf2n::FieldSpec;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub family: &'static str,
    pub n: u32,
    /// Distinct input pairs examined.
    pub pairs: u64,
    /// Size of the key space enumerated.
    pub keys: u64,
    pub max_count: u64,
    pub min_count: u64,
    /// `max_count / keys`.
    pub epsilon: f64,
}

impl UniversalityReport {
    /// `max_count / keys == num / den` in exact arithmetic.
    pub fn epsilon_is(&self, num: u64, den: u64) -> bool {
        self.max_count as u128 * den as u128 == num as u128 * self.keys as u128
    }
}

/// `h_{k'}(x) = k'·x` over all of GF(2^n), all keys, all pairs `x < y`.
/// Every `(x, y, z)` count is exactly 1.
pub fn multiplicative_hash_universality(n: u32) -> Result<UniversalityReport> {
    if n > 10 {
        return Err(Error::ParamsOutOfRange("exhaustive count limited to n <= 10".into()));
    }
    let field = FieldSpec::canonical(n)?;
    let h = MultiplicativeHash::new(field).allowing_zero_tweak();
    let size = 1u64 << n;
    let per_x: Vec<Result<(u64, u64, u64)>> = (0..size)
        .into_par_iter()
        .map(|x| {
            let (mut max, mut min, mut pairs) = (0u64, u64::MAX, 0u64);
            let mut counts = vec![0u64; size as usize];
            for y in x + 1..size {
                counts.iter_mut().for_each(|c| *c = 0);
                for k in 0..size {
                    counts[(h.hash(k, x)? ^ h.hash(k, y)?) as usize] += 1;
                }
                max = max.max(*counts.iter().max().expect("nonempty"));
                min = min.min(*counts.iter().min().expect("nonempty"));
                pairs += 1;
            }
            Ok((max, min, pairs))
        })
        .collect();
    let (mut max, mut min, mut pairs) = (0, u64::MAX, 0);
    for r in per_x {
        let (a, b, p) = r?;
        if p > 0 {
            max = max.max(a);
            min = min.min(b);
            pairs += p;
        }
    }
    Ok(UniversalityReport {
        family: "multiplicative",
        n,
        pairs,
        keys: size,
        max_count: max,
        min_count: min,
        epsilon: max as f64 / size as f64,
    })
}

/// The permutation with Lehmer code `idx` on `size` points.
fn nth_permutation(mut idx: u64, size: usize) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..size as u32).collect();
    let mut out = Vec::with_capacity(size);
    let mut fact: u64 = (1..size as u64).product();
    for rem in (1..=size).rev() {
        let pos = (idx / fact) as usize;
        idx %= fact;
        out.push(pool.remove(pos));
        if rem > 1 {
            fact /= (rem - 1) as u64;
        }
    }
    out
}

/// Ideal-hash XEX2 offsets `α^j·π(i)` over all `(2^n)!` permutations `π`,
/// with tweaks `i ∈ {0,1}^n` and `0 ≤ j < j_count`. With `α` primitive and
/// `j_count = 2^n − 1` the maximum is `(2^n)!/(2^n − 1)`.
pub fn xex2_ideal_hash_universality(n: u32, alpha: u64, j_count: u64) -> Result<UniversalityReport> {
    if n > 3 {
        return Err(Error::ParamsOutOfRange("enumerating all permutations is limited to n <= 3".into()));
    }
    let field = FieldSpec::canonical(n)?;
    let size = 1usize << n;
    let tweaks: Vec<u64> = (0..size as u64)
        .flat_map(|i| (0..j_count).map(move |j| (i, j)))
        .map(|(i, j)| TweakXex::new(i, j).map(|t| t.code()))
        .collect::<Result<_>>()?;
    let tcount = tweaks.len();
    let pairs = tcount * (tcount - 1) / 2;
    let total: u64 = (1..=size as u64).product();
    let counts = (0..total)
        .into_par_iter()
        .fold(
            || vec![0u32; pairs * size],
            |mut acc, idx| {
                let pi = Permutation::from_forward(n, nth_permutation(idx, size)).expect("valid permutation");
                let h = Xex2HashFamily::with_permutation(field, alpha, &pi).expect("alpha checked below");
                let offs: Vec<u64> = tweaks.iter().map(|&t| h.hash(0, t).expect("tweak in range")).collect();
                let mut p = 0;
                for a in 0..tcount {
                    for b in a + 1..tcount {
                        acc[p * size + (offs[a] ^ offs[b]) as usize] += 1;
                        p += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u32; pairs * size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    // Surface a bad alpha before trusting the counts.
    Xex2HashFamily::with_permutation(field, alpha, &Permutation::identity(n)?)?;
    let max = *counts.iter().max().expect("nonempty") as u64;
    let min = *counts.iter().min().expect("nonempty") as u64;
    Ok(UniversalityReport {
        family: "xex2-ideal-hash",
        n,
        pairs: pairs as u64,
        keys: total,
        max_count: max,
        min_count: min,
        epsilon: max as f64 / total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lehmer_decoding_enumerates_all() {
        let mut seen: Vec<Vec<u32>> = (0..24).map(|i| nth_permutation(i, 4)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 24);
        assert_eq!(nth_permutation(0, 4), vec![0, 1, 2, 3]);
        assert_eq!(nth_permutation(23, 4), vec![3, 2, 1, 0]);
    }

    #[test]
    fn multiplicative_small() {
        let r = multiplicative_hash_universality(4).unwrap();
        assert_eq!((r.max_count, r.min_count), (1, 1));
        assert!(r.epsilon_is(1, 16));
    }

    #[test]
    fn xex2_ideal_hash_n2() {
        // GF(4): α = 2 has order 3.
        let r = xex2_ideal_hash_universality(2, 2, 3).unwrap();
        assert!(r.epsilon_is(1, 3), "{r:?}");
    }
}
