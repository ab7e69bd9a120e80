//! Concrete example schemes at toy parameters.

pub mod gm;
pub mod lwe;

pub use gm::{gm_decrypt, gm_encrypt, gm_encrypt_with, GmParams, GmScheme};
pub use lwe::{
    centered_phase, lwe_decrypt, lwe_encrypt, lwe_encrypt_with, lwe_threshold_decrypt, DecryptionRule, LweCiphertext,
    LweParams, LweScheme,
};
