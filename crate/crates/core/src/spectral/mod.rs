//! Frequency lattice, transforms and Fourier multipliers.
//!
//! The whole space `ℝⁿ` is replaced by the periodic box `[0, L)ⁿ` sampled
//! on `Nⁿ` points. Fields are stored by their Fourier-series coefficients
//! `u(x) = Σ_k c_k e^{i ξ_k·x}` with `ξ_k = 2πk/L`, in FFT order.

mod cutoff;
mod field;
mod lattice;
mod modulation;
mod multiplier;

pub use cutoff::{chi, lp_weight, psi, Dyadic};
pub use field::{forward_real, forward_transform, inverse_transform, SpectralField};
pub use lattice::{FrequencyLattice, GridSpec};
pub(crate) use modulation::uniform_step;
pub use modulation::{modulation_project, ModulationBand, SpaceTimeField, Window};
pub use multiplier::{
    bracket, bracket_multiplier, dyadic_bands, free_propagate, lp_project, sobolev_norm,
};

use serde::{Deserialize, Serialize};

/// Sign of a half-wave: `+` propagates with `e^{+it⟨D⟩}`, `-` with `e^{-it⟨D⟩}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim() {
            "+" | "plus" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(crate::Error::InvalidArgument(format!("unknown sign '{other}'"))),
        }
    }
}
