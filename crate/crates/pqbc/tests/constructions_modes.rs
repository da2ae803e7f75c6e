//! Exhaustive round trips for the constructions and reference checks for the
//! MAC and AEAD modes.

use pqbc::cipher::{rng_for, CipherFamily, CipherParams, IdealCipher};
use pqbc::constructions::*;
use pqbc::gf2n::FieldSpec;
use pqbc::modes::*;
use pqbc::Error;
use rand::Rng;

fn cipher(m: u32, n: u32, seed: u64) -> IdealCipher {
    IdealCipher::new(CipherParams::new(m, n, seed)).unwrap()
}

#[test]
fn fx_round_trips_exhaustively() {
    let e = cipher(8, 8, 1);
    let mut rng = rng_for(11);
    for k0 in 0..256 {
        let key = FxKey::new(k0, rng.random_range(0..256), rng.random_range(0..256));
        let mut seen = [false; 256];
        for x in 0..256 {
            let y = fx_enc(&e, &key, x).unwrap();
            assert!(!std::mem::replace(&mut seen[y as usize], true), "FX not injective for k0={k0}");
            assert_eq!(fx_dec(&e, &key, y).unwrap(), x);
        }
    }
}

#[test]
fn fx_tilde_round_trips_and_reflects() {
    let e = cipher(8, 8, 2);
    let alpha = fx_tilde_alpha(8);
    assert_eq!(alpha, 0x80);
    let mut rng = rng_for(12);
    for k0 in 0..256u64 {
        let key = FxKey::new(k0, rng.random_range(0..256), rng.random_range(0..256));
        let reflected = FxKey { k0: k0 ^ alpha, ..key };
        for x in 0..256 {
            let y = fx_tilde_enc(&e, &key, x).unwrap();
            assert_eq!(fx_tilde_dec(&e, &key, y).unwrap(), x);
            if k0 & alpha == 0 {
                assert_eq!(y, fx_enc(&e, &key, x).unwrap());
                // The reflected key runs FX backwards.
                assert_eq!(fx_tilde_enc(&e, &reflected, y).unwrap(), x);
            } else {
                assert_eq!(y, fx_dec(&e, &reflected, x).unwrap());
            }
        }
    }
}

#[test]
fn lrw_round_trips_exhaustively() {
    let e = cipher(8, 8, 3);
    let h = MultiplicativeHash::new(FieldSpec::canonical(8).unwrap());
    for (k, k_prime) in [(0, 1), (7, 0x53), (255, 0xFF)] {
        let key = LrwKey { k, k_prime };
        for tweak in 1..256 {
            let mut seen = [false; 256];
            for x in 0..256 {
                let y = lrw_enc(&e, &h, &key, tweak, x).unwrap();
                assert!(!std::mem::replace(&mut seen[y as usize], true));
                assert_eq!(lrw_dec(&e, &h, &key, tweak, y).unwrap(), x);
            }
        }
    }
    assert!(matches!(lrw_enc(&e, &h, &LrwKey { k: 0, k_prime: 1 }, 0, 0), Err(Error::TweakOutOfSpace(0))));
}

#[test]
fn xex2_round_trips_exhaustively() {
    let e = cipher(8, 8, 4);
    let field = FieldSpec::canonical(8).unwrap();
    for key in [Xex2Key::new(3, 9, 2).unwrap(), Xex2Key::single(200, 3).unwrap()] {
        for i in 0..256 {
            for j in [0, 1, 5, 254] {
                let t = TweakXex::new(i, j).unwrap();
                let mut seen = [false; 256];
                for x in 0..256 {
                    let y = xex2_enc(&e, &field, &key, t, x).unwrap();
                    assert!(!std::mem::replace(&mut seen[y as usize], true));
                    assert_eq!(xex2_dec(&e, &field, &key, t, y).unwrap(), x);
                }
            }
        }
    }
}

/// Doubling in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1, written out directly.
fn dbl8(a: u64) -> u64 {
    let s = (a << 1) & 0xFF;
    if a & 0x80 != 0 {
        s ^ 0x1B
    } else {
        s
    }
}

fn random_message(rng: &mut impl Rng, full: bool) -> (Vec<u64>, usize) {
    let blocks = rng.random_range(1..=6usize);
    let bits = if full { blocks * 8 } else { (blocks - 1) * 8 + rng.random_range(1..=8usize) };
    let mut v: Vec<u64> = (0..blocks).map(|_| rng.random_range(0..256)).collect();
    let tail = bits % 8;
    if tail != 0 {
        *v.last_mut().unwrap() &= !((1u64 << (8 - tail)) - 1) & 0xFF;
    }
    (v, bits)
}

#[test]
fn macs_match_reference_evaluator() {
    let e = cipher(8, 8, 5);
    let mut rng = rng_for(13);
    for _ in 0..1000 {
        let (k1, k2) = (rng.random_range(0..256), rng.random_range(0..256));
        let p1 = e.table(k1);
        let p2 = e.table(k2);

        let (blocks, _) = random_message(&mut rng, true);
        let msg = Message::from_blocks(8, blocks.clone()).unwrap();
        let mut acc = 0;
        for &b in &blocks {
            acc = p1.apply(acc ^ b);
        }
        assert_eq!(cbc_mac(&e, k1, &msg).unwrap(), acc);
        assert_eq!(ecbc_mac(&e, k1, k2, &msg).unwrap(), p2.apply(acc));

        let (blocks, bits) = random_message(&mut rng, false);
        let msg = Message::from_bits(8, blocks.clone(), bits).unwrap();
        let l = p1.apply(0);
        let (sub_full, sub_partial) = (dbl8(l), dbl8(dbl8(l)));
        assert_eq!(cmac_subkeys(&e, k1).unwrap(), (sub_full, sub_partial));
        let mut acc = 0;
        for &b in &blocks[..blocks.len() - 1] {
            acc = p1.apply(acc ^ b);
        }
        let tail = bits - (blocks.len() - 1) * 8;
        let last = *blocks.last().unwrap();
        let (last, sub) = if tail == 8 { (last, sub_full) } else { (last | 1 << (7 - tail), sub_partial) };
        assert_eq!(cmac(&e, k1, &msg).unwrap(), p1.apply(acc ^ last ^ sub));
    }
}

#[test]
fn mode_input_errors() {
    let e = cipher(8, 8, 6);
    assert!(matches!(cbc_mac(&e, 0, &Message::empty(8).unwrap()), Err(Error::EmptyMessage)));
    assert!(matches!(cbc_mac(&e, 0, &Message::from_bits(8, vec![0x80], 1).unwrap()), Err(Error::PartialBlock)));
    assert!(cmac(&e, 0, &Message::empty(8).unwrap()).is_err());
    assert!(cbc_mac(&e, 0, &Message::from_blocks(16, vec![1]).unwrap()).is_err());
}

#[test]
fn gcm_round_trips() {
    let e = cipher(8, 16, 7);
    let mut rng = rng_for(14);
    for _ in 0..500 {
        let k = rng.random_range(0..256);
        let nonce = rng.random_range(0..256);
        let ptn = rng.random_range(0..=15usize);
        let pt = Message::from_blocks(16, (0..ptn).map(|_| rng.random_range(0..1 << 16)).collect()).unwrap();
        let aad = Message::from_blocks(16, (0..rng.random_range(0..=3)).map(|_| rng.random_range(0..1 << 16)).collect())
            .unwrap();
        let s = rng.random_range(1..=16);
        let sealed = gcm_seal(&e, k, nonce, &aad, &pt, s).unwrap();
        assert_eq!(sealed.ciphertext.bit_len(), pt.bit_len());
        assert!(sealed.tag >> s == 0);
        assert_eq!(gcm_open(&e, k, nonce, &aad, &sealed).unwrap(), pt);
    }
    let short = Message::from_bits(16, vec![0xA000], 3).unwrap();
    let sealed = gcm_seal(&e, 1, 2, &Message::empty(16).unwrap(), &short, 16).unwrap();
    assert_eq!(sealed.ciphertext.blocks()[0] & 0x1FFF, 0, "unused keystream bits stay zero");
    assert_eq!(gcm_open(&e, 1, 2, &Message::empty(16).unwrap(), &sealed).unwrap(), short);
}

/// Forgeries against an 8-bit tag succeed about once in 256 tries.
#[test]
fn gcm_tamper_rejection_rate() {
    const TAG_BITS: u32 = 8;
    const TRIALS: usize = 40_000;
    let e = cipher(4, 16, 8);
    let mut rng = rng_for(15);
    let aad = Message::from_blocks(16, vec![0x1234]).unwrap();
    let mut accepted = 0usize;
    for _ in 0..TRIALS {
        let k = rng.random_range(0..16);
        let nonce = rng.random_range(0..256);
        let pt = Message::from_blocks(16, (0..4).map(|_| rng.random_range(0..1 << 16)).collect()).unwrap();
        let sealed = gcm_seal(&e, k, nonce, &aad, &pt, TAG_BITS).unwrap();
        let mut blocks = sealed.ciphertext.blocks().to_vec();
        let idx = rng.random_range(0..blocks.len());
        blocks[idx] ^= rng.random_range(1..1 << 16);
        let forged = AeadOutput { ciphertext: Message::from_blocks(16, blocks).unwrap(), ..sealed };
        match gcm_open(&e, k, nonce, &aad, &forged) {
            Ok(_) => accepted += 1,
            Err(Error::TagMismatch) => {}
            Err(other) => panic!("unexpected error {other}"),
        }
    }
    let p = 2f64.powi(-(TAG_BITS as i32));
    let sigma = (p * (1.0 - p) / TRIALS as f64).sqrt();
    let rejection = 1.0 - accepted as f64 / TRIALS as f64;
    assert!((rejection - (1.0 - p)).abs() <= 3.0 * sigma, "rejection rate {rejection}, expected {} ± {}", 1.0 - p, 3.0 * sigma);
}

#[test]
fn ideal_cipher_is_consistent() {
    let e = cipher(6, 8, 9);
    for k in 0..64 {
        for x in 0..256 {
            let y = e.enc(k, x);
            assert_eq!(e.forward(k, x).unwrap(), y);
            assert_eq!(e.dec(k, y), x);
        }
    }
    assert!(e.forward(64, 0).is_err());
    assert!(e.forward(0, 256).is_err());
}
