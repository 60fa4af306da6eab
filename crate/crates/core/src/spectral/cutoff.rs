use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dyadic frequency label: `0` (frequencies below one) or `2^k`, `k ≥ 0`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Dyadic(u64);

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic(0);
    pub const ONE: Dyadic = Dyadic(1);

    pub fn new(value: u64) -> Result<Self> {
        if value == 0 || value.is_power_of_two() {
            Ok(Dyadic(value))
        } else {
            Err(Error::InvalidArgument(format!("{value} is not dyadic")))
        }
    }

    pub fn pow2(k: u32) -> Self {
        Dyadic(1u64 << k)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `0, 1, 2, 4, …` up to and including the first power of two `≥ max`.
    pub fn up_to(max: f64) -> Vec<Dyadic> {
        let mut out = vec![Dyadic::ZERO, Dyadic::ONE];
        let mut k = 1u32;
        while (out[out.len() - 1].0 as f64) < max && k < 63 {
            out.push(Dyadic::pow2(k));
            k += 1;
        }
        out
    }
}

impl TryFrom<u64> for Dyadic {
    type Error = Error;

    fn try_from(value: u64) -> Result<Self> {
        Dyadic::new(value)
    }
}

impl From<Dyadic> for u64 {
    fn from(d: Dyadic) -> u64 {
        d.0
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
fn smooth_ramp(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Even smooth cutoff with `χ = 1` on `|t| ≤ 1` and `χ = 0` on `|t| ≥ 2`.
pub fn chi(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let up = smooth_ramp(2.0 - a);
        up / (up + smooth_ramp(a - 1.0))
    }
}

/// Annular bump `ψ(t) = χ(t) − χ(2t)`, supported in `1/2 ≤ |t| ≤ 2`.
#[inline]
pub fn psi(t: f64) -> f64 {
    chi(t) - chi(2.0 * t)
}

/// Littlewood-Paley weight `ψ_N(r)` at radius `r = |ξ|`; `ψ_0(r) = χ(2r)`
/// collects everything the bands `N ≥ 1` leave out.
#[inline]
pub fn lp_weight(band: Dyadic, r: f64) -> f64 {
    if band.is_zero() {
        chi(2.0 * r)
    } else {
        psi(r / band.as_f64())
    }
}
