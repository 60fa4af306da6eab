//! Half-wave formulation `u^± = (⟨D⟩ ∓ i∂_t)u/(2⟨D⟩)` and its solvers.
//!
//! With `F = N(u⁺ + u⁻)` the system reads
//!
//! ```text
//! ∂_t u^± = ±i⟨D⟩u^± ∓ i F/(2⟨D⟩),
//! u = u⁺ + u⁻,   ∂_t u = i⟨D⟩(u⁺ − u⁻).
//! ```

mod evolve;
mod pair;
mod picard;
mod profile;
mod stepper;

pub use evolve::{evolve, scattering_state, stability_threshold, EvolveOptions, Evolution, ScatteringReport, SeriesRecord, Trajectory};
pub use pair::{decompose, initial_pair, initial_state, linear_energy, linear_exact, system_energy, CauchyData, HalfWavePair};
pub use picard::{picard_iterate, PicardOptions, PicardReport};
pub use profile::{gaussian_profile, scale_to_norm};
pub use stepper::{nonlinear_rhs, step_exponential, LawsonStepper};

/// Half-wave state of a `K`-component system.
pub type State = Vec<HalfWavePair>;
