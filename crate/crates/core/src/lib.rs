//! Encryption schemes, bridges between them, and the games used to test
//! their correctness and security on toy parameters.

pub mod bridges;
pub mod circuits;
pub mod error;
pub mod exec;
pub mod fche;
pub mod gentry;
pub mod harness;
pub mod homomorphic;
pub mod params;
pub mod registry;
pub mod rng;
pub mod scheme;
pub mod schemes;
pub mod value;

pub use error::{Error, Result};
pub use exec::Execution;
pub use scheme::{
    augment, check_correctness, check_correctness_with, fiber_power, Ciphertext, CorrectnessReport, KeyPair, Message,
    PublicKey, Scheme, SchemeRef, SecretKey, SecurityParameter,
};
pub use value::{Space, Value};
