//! Numerical checks of the dispersive and resonance inequalities.
//!
//! Inequalities with implicit constants are checked for uniformity: the
//! observed ratios across a sweep must stay within a fixed factor of each
//! other. Every stochastic check draws from a seeded ChaCha stream so that
//! records are reproducible.

mod bilinear;
mod convolution;
mod modulation;
mod shell;
mod strauss;
mod strichartz;
mod trilinear;

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use bilinear::{bilinear_ratio, verify_bilinear, BilinearCase, BilinearMode, BilinearTrial, FrequencyProfile};
pub use convolution::convolution_support_constant;
pub use modulation::{
    nonresonance_search, verify_modulation_bound, verify_nonresonance_bound, ResonanceMinimum, SampleSpec,
};
pub use shell::{shell_intersection_volume, shell_sweep, ShellEstimate, ShellSpec};
pub use strauss::{strauss_exponent, strauss_residual};
pub use strichartz::{strichartz_admissible, strichartz_q, Exponent, StrichartzFamily};
pub use trilinear::{trilinear_integral, verify_trilinear, TrilinearCase};

/// Outcome of one verification, serialized as one JSON line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub ratios: Vec<f64>,
    pub bound: String,
    /// Largest observed ratio.
    pub constant: f64,
    /// Largest over smallest nonzero ratio.
    pub spread: f64,
    pub passed: bool,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl VerificationRecord {
    pub fn new(name: &str, bound: &str) -> Self {
        VerificationRecord {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            ratios: Vec::new(),
            bound: bound.to_string(),
            constant: 0.0,
            spread: 1.0,
            passed: false,
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    /// Sets `ratios`, `constant` and `spread`.
    pub fn with_ratios(mut self, ratios: Vec<f64>) -> Self {
        self.constant = ratios.iter().cloned().fold(0.0, f64::max);
        self.spread = spread(&ratios);
        self.ratios = ratios;
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn write_line(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.to_json_line())
    }
}

/// `max / min` over the strictly positive entries (1 when there are none).
pub fn spread(values: &[f64]) -> f64 {
    let pos: Vec<f64> = values.iter().cloned().filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        return 1.0;
    }
    let max = pos.iter().cloned().fold(0.0, f64::max);
    let min = pos.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Independent stream `index` of the generator seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `⟨x⟩_m` from `|x|²`.
#[inline]
pub(crate) fn jb(norm2: f64, mass: f64) -> f64 {
    (mass * mass + norm2).sqrt()
}
