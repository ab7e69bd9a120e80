//! Boolean circuits, their ring lifting and decryption-circuit synthesis.

pub mod arith;
pub mod circuit;
pub mod synth;

pub use arith::{
    arithmetize, oplus, otimes, two_element_field_equations, ModRing, Ring, RingCircuit, RingEq, RingNode,
};
pub use circuit::{random_circuit, random_circuit_with_depth, BooleanCircuit, CircuitBuilder, Gate};
pub use synth::{compile_decryption_circuit, decryption_function_circuit, recryption_depth_bound, synthesize};
