//! Toy-width modes: CBC-MAC, ECBC-MAC, CMAC and a small GCM (CTR encryption,
//! GHASH over GF(2^n), truncated tag).
//!
//! Bit strings are packed into n-bit blocks left-aligned: the first message bit
//! is the most significant bit of block 0, and a short final block keeps its
//! bits at the top with zeros below.

use crate::cipher::{block_mask, CipherFamily};
use crate::error::{check_width, Error, Result};
use crate::gf2n::FieldSpec;
use serde::Serialize;

/// A bit string split into n-bit blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Message {
    n: u32,
    blocks: Vec<u64>,
    bit_len: usize,
}

impl Message {
    /// A message of whole blocks.
    pub fn from_blocks(n: u32, blocks: Vec<u64>) -> Result<Self> {
        let bit_len = blocks.len() * n as usize;
        Self::from_bits(n, blocks, bit_len)
    }

    /// A message of `bit_len` bits. Unused low bits of a short final block
    /// must be zero.
    pub fn from_bits(n: u32, blocks: Vec<u64>, bit_len: usize) -> Result<Self> {
        if !(1..=63).contains(&n) {
            return Err(Error::ParamsOutOfRange(format!("block width n={n} must be in 1..=63")));
        }
        let nu = n as usize;
        if blocks.len() != bit_len.div_ceil(nu) {
            return Err(Error::ParamsOutOfRange(format!(
                "{} blocks cannot hold exactly {bit_len} bits",
                blocks.len()
            )));
        }
        for &b in &blocks {
            check_width(b, n)?;
        }
        let tail = bit_len % nu;
        if tail != 0 {
            let last = *blocks.last().expect("nonempty when tail is nonzero");
            if last & block_mask((nu - tail) as u32) != 0 {
                return Err(Error::ParamsOutOfRange("bits beyond the message length must be zero".into()));
            }
        }
        Ok(Self { n, blocks, bit_len })
    }

    pub fn empty(n: u32) -> Result<Self> {
        Self::from_bits(n, Vec::new(), 0)
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    /// Block count ℓ.
    pub fn ell(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    /// Whether the message ends on a block boundary.
    pub fn is_full(&self) -> bool {
        self.bit_len % self.n as usize == 0
    }

    /// Bits used in the final block (n for a full block, 0 when empty).
    fn tail_bits(&self) -> u32 {
        match self.bit_len % self.n as usize {
            0 if self.bit_len > 0 => self.n,
            r => r as u32,
        }
    }
}

/// Ciphertext and `s`-bit tag of the toy GCM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AeadOutput {
    pub ciphertext: Message,
    pub tag: u64,
    pub tag_bits: u32,
}

fn check_mode_input<C: CipherFamily + ?Sized>(e: &C, k: u64, msg: &Message) -> Result<()> {
    check_width(k, e.key_bits())?;
    if msg.n != e.block_bits() {
        return Err(Error::ParamsOutOfRange("message block width differs from the cipher's".into()));
    }
    Ok(())
}

fn cbc_chain<C: CipherFamily + ?Sized>(e: &C, k: u64, blocks: &[u64]) -> u64 {
    blocks.iter().fold(0, |acc, &x| e.enc(k, acc ^ x))
}

/// `E_k(…E_k(E_k(x₁) ⊕ x₂)… ⊕ x_ℓ)`.
pub fn cbc_mac<C: CipherFamily + ?Sized>(e: &C, k: u64, msg: &Message) -> Result<u64> {
    check_mode_input(e, k, msg)?;
    if msg.is_empty() {
        return Err(Error::EmptyMessage);
    }
    if !msg.is_full() {
        return Err(Error::PartialBlock);
    }
    Ok(cbc_chain(e, k, &msg.blocks))
}

/// `E_{k2}(CBC-MAC_{k1}(x))`.
pub fn ecbc_mac<C: CipherFamily + ?Sized>(e: &C, k1: u64, k2: u64, msg: &Message) -> Result<u64> {
    check_width(k2, e.key_bits())?;
    let inner = cbc_mac(e, k1, msg)?;
    Ok(e.enc(k2, inner))
}

/// The two CMAC whitening subkeys `(2·L, 4·L)` with `L = E_k(0)`.
pub fn cmac_subkeys<C: CipherFamily + ?Sized>(e: &C, k: u64) -> Result<(u64, u64)> {
    check_width(k, e.key_bits())?;
    let f = FieldSpec::canonical(e.block_bits())?;
    let l = e.enc(k, 0);
    let full = f.double(l);
    Ok((full, f.double(full)))
}

/// CMAC: CBC over all but the last block, then the last block (10*-padded if
/// short) whitened by the matching subkey and encrypted.
pub fn cmac<C: CipherFamily + ?Sized>(e: &C, k: u64, msg: &Message) -> Result<u64> {
    check_mode_input(e, k, msg)?;
    if msg.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let (k_full, k_partial) = cmac_subkeys(e, k)?;
    let (last, head) = msg.blocks.split_last().expect("nonempty");
    let r = msg.tail_bits();
    let (last, sub) = if r == msg.n { (*last, k_full) } else { (*last | 1u64 << (msg.n - 1 - r), k_partial) };
    let acc = cbc_chain(e, k, head);
    Ok(e.enc(k, acc ^ last ^ sub))
}

fn gcm_check<C: CipherFamily + ?Sized>(e: &C, k: u64, nonce: u64, tag_bits: u32) -> Result<u32> {
    check_width(k, e.key_bits())?;
    let n = e.block_bits();
    if n % 2 != 0 || n < 4 {
        return Err(Error::ParamsOutOfRange(format!("toy GCM needs an even block width of at least 4, got {n}")));
    }
    let half = n / 2;
    if nonce >> half != 0 {
        return Err(Error::NonceWidth(half));
    }
    if !(1..=n).contains(&tag_bits) {
        return Err(Error::ParamsOutOfRange(format!("tag width s={tag_bits} must be in 1..={n}")));
    }
    Ok(half)
}

/// CTR keystream applied to `msg` with counters starting at 1.
fn ctr_xor<C: CipherFamily + ?Sized>(e: &C, k: u64, nonce: u64, half: u32, msg: &Message) -> Result<Message> {
    if msg.ell() as u64 >= 1u64 << half {
        return Err(Error::ParamsOutOfRange(format!("message exceeds {} blocks", (1u64 << half) - 1)));
    }
    let n = msg.n;
    let r = msg.tail_bits();
    let last = msg.ell().saturating_sub(1);
    let blocks = msg
        .blocks
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let ks = e.enc(k, (nonce << half) | (i as u64 + 1));
            let ks = if i == last && r < n { ks & !block_mask(n - r) } else { ks };
            p ^ ks
        })
        .collect();
    Message::from_bits(n, blocks, msg.bit_len)
}

/// GHASH with hash key `h` over the zero-padded AAD, the ciphertext and the
/// length block `len(A) ‖ len(C)` (each n/2 bits).
pub fn ghash(f: &FieldSpec, h: u64, aad: &Message, ct: &Message) -> Result<u64> {
    let half = f.n() / 2;
    for len in [aad.bit_len, ct.bit_len] {
        if (len as u64) >> half != 0 {
            return Err(Error::ParamsOutOfRange(format!("bit length {len} does not fit in {half} bits")));
        }
    }
    let len_block = ((aad.bit_len as u64) << half) | ct.bit_len as u64;
    let x = aad
        .blocks
        .iter()
        .chain(ct.blocks.iter())
        .chain(std::iter::once(&len_block))
        .fold(0, |x, &b| f.mul(x ^ b, h));
    Ok(x)
}

fn gcm_tag<C: CipherFamily + ?Sized>(
    e: &C,
    k: u64,
    nonce: u64,
    half: u32,
    aad: &Message,
    ct: &Message,
    tag_bits: u32,
) -> Result<u64> {
    let n = e.block_bits();
    let f = FieldSpec::canonical(n)?;
    let h = e.enc(k, 0);
    let s = ghash(&f, h, aad, ct)?;
    Ok((e.enc(k, nonce << half) ^ s) >> (n - tag_bits))
}

/// Toy GCM encryption with an n/2-bit nonce and an `s`-bit tag.
pub fn gcm_seal<C: CipherFamily + ?Sized>(
    e: &C,
    k: u64,
    nonce: u64,
    aad: &Message,
    pt: &Message,
    tag_bits: u32,
) -> Result<AeadOutput> {
    let half = gcm_check(e, k, nonce, tag_bits)?;
    check_mode_input(e, k, aad)?;
    check_mode_input(e, k, pt)?;
    let ciphertext = ctr_xor(e, k, nonce, half, pt)?;
    let tag = gcm_tag(e, k, nonce, half, aad, &ciphertext, tag_bits)?;
    Ok(AeadOutput { ciphertext, tag, tag_bits })
}

/// Verifies the tag bit-exactly, then decrypts.
pub fn gcm_open<C: CipherFamily + ?Sized>(
    e: &C,
    k: u64,
    nonce: u64,
    aad: &Message,
    sealed: &AeadOutput,
) -> Result<Message> {
    let half = gcm_check(e, k, nonce, sealed.tag_bits)?;
    check_mode_input(e, k, aad)?;
    check_mode_input(e, k, &sealed.ciphertext)?;
    let expected = gcm_tag(e, k, nonce, half, aad, &sealed.ciphertext, sealed.tag_bits)?;
    if expected != sealed.tag {
        return Err(Error::TagMismatch);
    }
    ctr_xor(e, k, nonce, half, &sealed.ciphertext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{CipherParams, IdealCipher, Permutation, TableCipher};

    fn e8() -> IdealCipher {
        IdealCipher::new(CipherParams::new(4, 8, 5)).unwrap()
    }

    #[test]
    fn message_validation() {
        assert!(Message::from_bits(8, vec![0xF0], 4).is_ok());
        assert!(Message::from_bits(8, vec![0xF1], 4).is_err());
        assert!(Message::from_bits(8, vec![1, 2], 8).is_err());
        assert!(Message::from_blocks(8, vec![256]).is_err());
        assert_eq!(Message::from_bits(8, vec![1, 0x80], 9).unwrap().ell(), 2);
    }

    #[test]
    fn cbc_small_cases() {
        let e = e8();
        let one = Message::from_blocks(8, vec![0x3C]).unwrap();
        assert_eq!(cbc_mac(&e, 2, &one).unwrap(), e.enc(2, 0x3C));
        let two = Message::from_blocks(8, vec![0x3C, 0x81]).unwrap();
        assert_eq!(cbc_mac(&e, 2, &two).unwrap(), e.enc(2, e.enc(2, 0x3C) ^ 0x81));
        assert_eq!(cbc_mac(&e, 2, &Message::empty(8).unwrap()), Err(Error::EmptyMessage));
        let part = Message::from_bits(8, vec![0x80], 1).unwrap();
        assert_eq!(cbc_mac(&e, 2, &part), Err(Error::PartialBlock));
    }

    #[test]
    fn ecbc_with_identity_outer_key_is_cbc() {
        let t = TableCipher::new(2, 8).unwrap().with_table(1, Permutation::shuffled(8, 9).unwrap()).unwrap();
        let msg = Message::from_blocks(8, vec![1, 2, 3]).unwrap();
        assert_eq!(ecbc_mac(&t, 1, 0, &msg).unwrap(), cbc_mac(&t, 1, &msg).unwrap());
    }

    #[test]
    fn cmac_single_full_block() {
        let e = e8();
        let (k_full, _) = cmac_subkeys(&e, 3).unwrap();
        let msg = Message::from_blocks(8, vec![0x5A]).unwrap();
        assert_eq!(cmac(&e, 3, &msg).unwrap(), e.enc(3, 0x5A ^ k_full));
    }

    #[test]
    fn gcm_empty_and_nonce_width() {
        let e = IdealCipher::new(CipherParams::new(4, 16, 1)).unwrap();
        let empty = Message::empty(16).unwrap();
        let a = gcm_seal(&e, 1, 7, &empty, &empty, 16).unwrap();
        assert!(a.ciphertext.is_empty());
        assert_eq!(a, gcm_seal(&e, 1, 7, &empty, &empty, 16).unwrap());
        assert_eq!(gcm_seal(&e, 1, 256, &empty, &empty, 16), Err(Error::NonceWidth(8)));
    }
}
