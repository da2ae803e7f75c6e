use pqbc_ffi::*;
use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { pqbc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn new_cipher(m: u32, n: u32, seed: u64) -> *mut PqbcCipher {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { pqbc_cipher_new(m, n, seed, &mut c) }, PqbcStatus::Ok);
    assert!(!c.is_null());
    c
}

#[test]
fn cipher_round_trip_and_errors() {
    let c = new_cipher(6, 8, 1);
    let (mut y, mut x) = (0u64, 0u64);
    for p in 0..256 {
        assert_eq!(unsafe { pqbc_cipher_encrypt(c, 5, p, &mut y) }, PqbcStatus::Ok);
        assert_eq!(unsafe { pqbc_cipher_decrypt(c, 5, y, &mut x) }, PqbcStatus::Ok);
        assert_eq!(x, p);
    }
    assert_eq!(unsafe { pqbc_cipher_encrypt(c, 64, 0, &mut y) }, PqbcStatus::WidthMismatch);
    assert!(last_error().contains("6 bits"), "{}", last_error());
    assert_eq!(unsafe { pqbc_cipher_encrypt(c, 0, 0, ptr::null_mut()) }, PqbcStatus::NullPointer);
    assert_eq!(unsafe { pqbc_cipher_encrypt(ptr::null(), 0, 0, &mut y) }, PqbcStatus::NullPointer);
    unsafe { pqbc_cipher_free(c) };
    unsafe { pqbc_cipher_free(ptr::null_mut()) };
}

#[test]
fn cipher_rejects_oversized_block() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { pqbc_cipher_new(8, 40, 1, &mut c) }, PqbcStatus::ParamsOutOfRange);
    assert!(c.is_null());
}

#[test]
fn constructions_invert() {
    let c = new_cipher(8, 8, 2);
    let (mut y, mut x) = (0u64, 0u64);
    for p in 0..256 {
        unsafe {
            assert_eq!(pqbc_fx(c, 3, 0x11, 0x22, p, false, &mut y), PqbcStatus::Ok);
            assert_eq!(pqbc_fx(c, 3, 0x11, 0x22, y, true, &mut x), PqbcStatus::Ok);
            assert_eq!(x, p);
            assert_eq!(pqbc_xex2(c, 3, 4, 2, 5, 6, p, false, &mut y), PqbcStatus::Ok);
            assert_eq!(pqbc_xex2(c, 3, 4, 2, 5, 6, y, true, &mut x), PqbcStatus::Ok);
            assert_eq!(x, p);
        }
    }
    assert_eq!(unsafe { pqbc_lrw(c, 3, 4, 0, 1, false, &mut y) }, PqbcStatus::TweakOutOfSpace);
    unsafe { pqbc_cipher_free(c) };
}

#[test]
fn field_arithmetic() {
    let mut v = 0;
    // x^7 · x = x^8 = x^4 + x^3 + x + 1 under the canonical GF(2^8) modulus 0x11B.
    assert_eq!(unsafe { pqbc_gf_mul(8, 0x80, 0x02, &mut v) }, PqbcStatus::Ok);
    assert_eq!(v, 0x1B);
    assert_eq!(unsafe { pqbc_gf_inv(8, 0x53, &mut v) }, PqbcStatus::Ok);
    assert_eq!(v, 0xCA);
    assert_eq!(unsafe { pqbc_gf_inv(8, 0, &mut v) }, PqbcStatus::ZeroInverse);
}

#[test]
fn bounds_through_the_abi() {
    let mut q = PqbcBoundQuery { m: 12, n: 12, q_c: 4.0, q_q: 16.0, ell: 0.0, sigma: 0.0, q_c_dec: 0.0, tag_bits: 0, has: 0 };
    let mut b = PqbcBound::default();
    assert_eq!(unsafe { pqbc_bound(PqbcFormula::FxPq as u32, &q, &mut b) }, PqbcStatus::Ok);
    assert!((b.value - 0.031_255_725_191_031_82).abs() < 1e-15);
    assert_eq!(b.term_count, 2);
    assert_eq!(unsafe { pqbc_bound(PqbcFormula::ModeCmac as u32, &q, &mut b) }, PqbcStatus::MissingParameter);
    q.ell = 4.0;
    q.has = PQBC_HAS_ELL;
    assert_eq!(unsafe { pqbc_bound(PqbcFormula::ModeCmac as u32, &q, &mut b) }, PqbcStatus::Ok);
    assert_eq!(b.term_count, 2);
    assert_eq!(unsafe { pqbc_bound(99, &q, &mut b) }, PqbcStatus::UnknownEnum);
    q.q_c = -1.0;
    assert_eq!(unsafe { pqbc_bound(PqbcFormula::FxPq as u32, &q, &mut b) }, PqbcStatus::ParamsOutOfRange);
}

#[test]
fn experiment_and_hybrids() {
    let cfg = PqbcExperimentConfig {
        construction: PqbcConstruction::Fx as u32,
        distinguisher: PqbcDistinguisher::ConstantOne as u32,
        m: 8,
        n: 8,
        trials: 50,
        seed: 3,
        q_c: 4,
        q_q: 16,
    };
    let mut r = PqbcExperimentResult::default();
    assert_eq!(unsafe { pqbc_run_distinguishing(&cfg, &mut r) }, PqbcStatus::Ok);
    assert_eq!((r.p_real, r.p_ideal, r.advantage), (1.0, 1.0, 0.0));
    let bad = PqbcExperimentConfig { distinguisher: PqbcDistinguisher::Birthday as u32, ..cfg };
    assert_eq!(unsafe { pqbc_run_distinguishing(&bad, &mut r) }, PqbcStatus::ParamsOutOfRange);

    let mut h = PqbcHybridSummary::default();
    assert_eq!(unsafe { pqbc_verify_hybrids(false, 8, 8, 8, 50, 1, &mut h) }, PqbcStatus::Ok);
    assert_eq!(h.instances, 50);
    assert_eq!(h.bad_instances, 0);
    assert_eq!(unsafe { pqbc_verify_hybrids(true, 8, 8, 40, 50, 1, &mut h) }, PqbcStatus::ParamsOutOfRange);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(pqbc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_profile_dir() -> PathBuf {
    // <target>/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_static_library() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_profile_dir().join("libpqbc_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C smoke test exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.031256");
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
