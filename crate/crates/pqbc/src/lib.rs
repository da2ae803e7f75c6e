//! Toolkit for the post-quantum security of key-length extensions and
//! tweakable block ciphers in the Q1 model: ideal ciphers with the swap
//! algebra, FX/LRW/XEX2, toy modes, classical and simulated quantum attacks,
//! closed-form advantage bounds and a Monte Carlo experiment harness.

pub mod attacks;
pub mod bounds;
pub mod cipher;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod gf2n;
pub mod modes;
pub mod qsim;

pub use error::{Error, Result};
