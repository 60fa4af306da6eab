//! Mass systems, quadratic nonlinearities and the resonance function.

mod definition;
mod nonlinearity;
mod resonance;

pub use definition::{Factor, MassSystem, Monomial};
pub use nonlinearity::evaluate_nonlinearity;
pub use resonance::{check_nonresonance, resonance_function, ResonanceProbe};
