//! Objective functions over binary variables and the transforms between
//! their polynomial, QUBO and Ising forms.

mod device;
mod ising;
mod polynomial;
mod quadratize;
mod qubo;

pub use device::{perturb, scale_to_device, CoefficientRange, DeviceRanges, IceNoise, ScaledIsing};
pub use ising::{ising_to_qubo, qubo_to_ising, IsingModel};
pub use polynomial::{BinaryPolynomial, MAX_DEGREE};
pub use quadratize::{
    default_penalty_weight, quadratize, quadratize_with, AuxVariable, PairSelection, Quadratized,
};
pub use qubo::{to_qubo, QuboModel};

/// Converts a spin (`+1`/`-1`) to its bit under `s = 1 - 2x`.
pub fn spin_to_bit(s: i8) -> bool {
    s < 0
}

/// Converts a bit to its spin under `s = 1 - 2x`.
pub fn bit_to_spin(x: bool) -> i8 {
    if x {
        -1
    } else {
        1
    }
}
