//! Arithmetic in GF(2^n) for 1 ≤ n ≤ 64, plus the multiplicative
//! XOR-universal hash `h_{k'}(τ) = k'·τ` used by LRW and XEX2.
//!
//! Elements are plain `u64` values in the polynomial basis: bit `i` is the
//! coefficient of `x^i`. The modulus is stored with its leading bit, so a
//! degree-64 polynomial needs a `u128`.

use crate::error::{check_width, Error, Result};
use serde::Serialize;

/// A binary field GF(2^n) fixed by an irreducible modulus of degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldSpec {
    n: u32,
    modulus: u128,
}

impl FieldSpec {
    /// Builds a field from an explicit modulus, rejecting anything that is not
    /// irreducible of degree exactly `n`.
    pub fn new(n: u32, modulus: u128) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::ParamsOutOfRange(format!("field width n={n} must be in 1..=64")));
        }
        if degree(modulus) != n as i32 || !is_irreducible(modulus) {
            return Err(Error::ReducibleModulus(modulus));
        }
        Ok(Self { n, modulus })
    }

    /// The shipped modulus for width `n`: x³+x+1, x⁴+x+1 and the AES polynomial
    /// for n = 3, 4, 8, otherwise the numerically smallest irreducible.
    pub fn canonical(n: u32) -> Result<Self> {
        let modulus = match n {
            3 => 0b1011,
            4 => 0x13,
            8 => 0x11B,
            1..=64 => least_irreducible(n),
            _ => return Err(Error::ParamsOutOfRange(format!("field width n={n} must be in 1..=64"))),
        };
        Self::new(n, modulus)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Number of field elements, saturating at `u64::MAX` for n = 64.
    pub fn order(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            1u64 << self.n
        }
    }

    pub fn mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Validates that `v` is an element of this field.
    pub fn element(&self, v: u64) -> Result<u64> {
        check_width(v, self.n)
    }

    fn reduce(&self, mut p: u128) -> u64 {
        let n = self.n as i32;
        let mut d = degree(p);
        while d >= n {
            p ^= self.modulus << (d - n);
            d = degree(p);
        }
        p as u64
    }

    /// Carryless product reduced modulo the field polynomial.
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(clmul(a, b))
    }

    /// Multiplication by `x`, the "doubling" used for CMAC subkeys.
    pub fn double(&self, a: u64) -> u64 {
        self.reduce((a as u128) << 1)
    }

    /// Square-and-multiply exponentiation; `pow(a, 0) = 1`.
    pub fn pow(&self, a: u64, mut j: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while j > 0 {
            if j & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            j >>= 1;
        }
        acc
    }

    /// Inverse via Fermat: `a^(2^n - 2)`.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let e = if self.n == 64 { u64::MAX - 1 } else { (1u64 << self.n) - 2 };
        Ok(self.pow(a, e))
    }

    /// The multiplicative hash `h_{k'}(τ) = k'·τ`. Note `h(0) = 0` for every key,
    /// so the hash is uniform only on nonzero tweaks.
    pub fn hash_mul(&self, k_prime: u64, tweak: u64) -> u64 {
        self.mul(k_prime, tweak)
    }
}

pub fn gf_mul(a: u64, b: u64, f: &FieldSpec) -> u64 {
    f.mul(a, b)
}

pub fn gf_pow(a: u64, j: u64, f: &FieldSpec) -> u64 {
    f.pow(a, j)
}

pub fn gf_inv(a: u64, f: &FieldSpec) -> Result<u64> {
    f.inv(a)
}

pub fn hash_mul(k_prime: u64, tweak: u64, f: &FieldSpec) -> u64 {
    f.hash_mul(k_prime, tweak)
}

/// Carryless (GF(2)[x]) product of two 64-bit polynomials.
pub fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let wide = a as u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= wide << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

/// Degree of a polynomial, with -1 for the zero polynomial.
pub fn degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

/// Remainder of polynomial division `a mod m` over GF(2).
pub fn poly_mod(mut a: u128, m: u128) -> u128 {
    let dm = degree(m);
    assert!(dm >= 0, "division by the zero polynomial");
    let mut da = degree(a);
    while da >= dm {
        a ^= m << (da - dm);
        da = degree(a);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

fn poly_mulmod(a: u128, b: u128, f: u128) -> u128 {
    // Operands are reduced below degree 64, so the product fits in 127 bits.
    poly_mod(clmul(a as u64, b as u64), f)
}

/// Irreducibility over GF(2).
///
/// Up to degree 20 this is plain trial division by every polynomial of degree
/// at most `deg/2`. Beyond that the candidate count explodes, so Ben-Or's test
/// is used: `f` is irreducible iff `gcd(f, x^(2^i) - x) = 1` for all `i ≤ deg/2`.
pub fn is_irreducible(f: u128) -> bool {
    let n = degree(f);
    if n <= 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    if n <= 20 {
        is_irreducible_trial(f)
    } else {
        is_irreducible_ben_or(f)
    }
}

pub fn is_irreducible_trial(f: u128) -> bool {
    let n = degree(f);
    if n <= 0 {
        return false;
    }
    for d in 1..=(n / 2) {
        for p in (1u128 << d)..(1u128 << (d + 1)) {
            if poly_mod(f, p) == 0 {
                return false;
            }
        }
    }
    true
}

pub fn is_irreducible_ben_or(f: u128) -> bool {
    let n = degree(f);
    if n <= 0 {
        return false;
    }
    let x = poly_mod(0b10, f);
    let mut u = x;
    for _ in 1..=(n / 2) {
        u = poly_mulmod(u, u, f);
        if poly_gcd(f, u ^ x) != 1 {
            return false;
        }
    }
    true
}

/// Numerically smallest irreducible polynomial of degree `n`.
pub fn least_irreducible(n: u32) -> u128 {
    let lo = 1u128 << n;
    (lo..lo << 1)
        .find(|&p| is_irreducible(p))
        .expect("an irreducible polynomial exists in every degree")
}
