//! Pseudospectral laboratory for quadratic Klein-Gordon systems
//!
//! ```text
//! (□ + m_i²) u_i = N_i(u_1, …, u_K),   i = 1, …, K
//! ```
//!
//! on a periodic box, written in half-wave variables
//! `u^± = (⟨D⟩ ∓ i∂_t) u / (2⟨D⟩)` and solved either by a Lawson-RK4
//! exponential integrator or by Picard iteration of the Duhamel formula.
//!
//! The crate is organized as
//!
//! * [`spectral`]: lattice, transforms, Japanese-bracket multipliers,
//!   Littlewood-Paley and modulation projectors, Sobolev norms.
//! * [`system`]: mass systems, dealiased quadratic nonlinearities and the
//!   resonance function.
//! * [`halfwave`]: half-wave decomposition, exact linear flow, time
//!   integration, Picard iteration and scattering profiles.
//! * [`variation`]: p-variation by dynamic programming and the V²-type
//!   trajectory norms built on it.
//! * [`harness`]: numerical checks of the dispersive and resonance
//!   inequalities (modulation bounds, thin-shell volumes, bilinear and
//!   trilinear estimates, Strichartz exponents, Strauss exponent).

pub mod error;
pub mod halfwave;
pub mod harness;
pub mod spectral;
pub mod system;
pub mod variation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
