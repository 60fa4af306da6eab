use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bilinear::{FrequencyProfile, Modulation};
use super::{jb, stream, VerificationRecord};
use crate::spectral::{Dyadic, Sign};
use crate::{Complex64, Error, Result};

/// `(1/H) |∫₀^∞ ∫ u_L v_{H'} w_H dx dt|` for free waves
/// `e^{±_i it⟨D⟩} φ_i` with `φ₁, φ₂, φ₃` in the annuli `L, H', H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrilinearCase {
    pub dim: usize,
    pub low: Dyadic,
    pub high_prime: Dyadic,
    pub high: Dyadic,
    pub signs: [Sign; 3],
    pub mass: f64,
    /// Exponent `s ≥ max(1/2, (n−2)/2)` on the low factor.
    pub s: f64,
    pub trials: usize,
    pub seed: u64,
    /// Grid points per axis over each annulus.
    pub grid: usize,
    /// Random packet modulation of the data; `false` uses pure envelopes.
    pub random_phases: bool,
}

impl TrilinearCase {
    pub fn new(dim: usize, low: Dyadic, high: Dyadic, signs: [Sign; 3]) -> Self {
        TrilinearCase {
            dim,
            low,
            high_prime: high,
            high,
            signs,
            mass: 1.0,
            s: (0.5f64).max((dim as f64 - 2.0) / 2.0),
            trials: 2,
            seed: 1,
            grid: 40,
            random_phases: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidArgument(format!("trilinear dimension {} outside 1..=3", self.dim)));
        }
        if self.low.is_zero() || self.high.is_zero() || self.high_prime.is_zero() {
            return Err(Error::InvalidArgument("trilinear bands must be at least 1".into()));
        }
        let (h, hp) = (self.high.as_f64(), self.high_prime.as_f64());
        if h.max(hp) > 2.0 * h.min(hp) {
            return Err(Error::InvalidArgument("need H ~ H'".into()));
        }
        if self.low > self.high {
            return Err(Error::InvalidArgument("need L ≤ H".into()));
        }
        if !(self.mass > 0.0) {
            return Err(Error::NonPositiveMass(self.mass));
        }
        if self.grid < 8 || self.trials == 0 {
            return Err(Error::UnderResolved(format!("grid {} (need ≥ 8), trials {}", self.grid, self.trials)));
        }
        Ok(())
    }
}

/// Nonzero grid samples `(ξ, φ̂(ξ) hⁿ)` of an annulus profile and `∫|φ̂|²`.
fn sample(profile: &FrequencyProfile, m: &Modulation, dim: usize, grid: usize) -> (Vec<([f64; 3], Complex64)>, f64) {
    let scale = profile.scale();
    let h = 4.0 * scale / grid as f64;
    let vol = h.powi(dim as i32);
    let mut pts = Vec::new();
    let mut sq = 0.0;
    for idx in 0..grid.pow(dim as u32) {
        let mut xi = [0.0; 3];
        let mut rem = idx;
        for x in xi.iter_mut().take(dim) {
            *x = -2.0 * scale + h * ((rem % grid) as f64 + 0.5);
            rem /= grid;
        }
        let env = profile.envelope(&xi[..dim]);
        if env != 0.0 {
            let v = m.value(&xi[..dim]) * env;
            sq += v.norm_sqr() * vol;
            pts.push((xi, v * vol));
        }
    }
    (pts, sq)
}

fn modulation(case: &TrilinearCase, rng: &mut ChaCha8Rng, scale: f64) -> Modulation {
    if case.random_phases {
        Modulation::draw(rng, case.dim, scale)
    } else {
        Modulation::constant()
    }
}

/// `∫₀^∞ e^{−εt} ∫ u₁u₂u₃ dx dt = (2π)^{−2n} ∫∫ φ̂₁(ξ₁)φ̂₂(ξ₂)φ̂₃(−ξ₁−ξ₂) / (ε − iΩ)`
/// with `Ω = Σ ±_i⟨ξ_i⟩`, by Riemann sums over the annuli of `φ₁` and `φ₂`.
pub(crate) fn damped_integral(
    dim: usize,
    signs: [Sign; 3],
    mass: f64,
    data: [(&FrequencyProfile, &Modulation); 3],
    grid: usize,
    eps: f64,
) -> (Complex64, [f64; 3]) {
    let (p1, sq1) = sample(data[0].0, data[0].1, dim, grid);
    let (p2, sq2) = sample(data[1].0, data[1].1, dim, grid);
    let (_, sq3) = sample(data[2].0, data[2].1, dim, grid);
    let s = signs.map(|x| x.value());
    let partial: Vec<Complex64> = p1
        .par_iter()
        .map(|(x1, w1)| {
            let a = s[0] * jb(x1[..dim].iter().map(|v| v * v).sum(), mass);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut x3 = [0.0; 3];
            for (x2, w2) in &p2 {
                for d in 0..dim {
                    x3[d] = -x1[d] - x2[d];
                }
                let env = data[2].0.envelope(&x3[..dim]);
                if env == 0.0 {
                    continue;
                }
                let b = s[1] * jb(x2[..dim].iter().map(|v| v * v).sum(), mass);
                let c = s[2] * jb(x3[..dim].iter().map(|v| v * v).sum(), mass);
                let f3 = data[2].1.value(&x3[..dim]) * env;
                acc += w2 * f3 / Complex64::new(eps, -(a + b + c));
            }
            w1 * acc
        })
        .collect();
    let sum: Complex64 = partial.iter().sum();
    let two_pi_n = (2.0 * std::f64::consts::PI).powi(dim as i32);
    let norms = [sq1, sq2, sq3].map(|q| (q / two_pi_n).sqrt());
    (sum / (two_pi_n * two_pi_n), norms)
}

/// Integral and data norms `‖φ_i‖` for trial `trial`.
pub fn trilinear_integral(case: &TrilinearCase, trial: usize) -> Result<(Complex64, [f64; 3])> {
    case.validate()?;
    let mut rng = stream(case.seed, trial as u64);
    let profiles = [case.low, case.high_prime, case.high].map(|b| FrequencyProfile::Annulus { scale: b.as_f64() });
    let mods: Vec<Modulation> = profiles.iter().map(|p| modulation(case, &mut rng, p.scale())).collect();
    Ok(damped_integral(
        case.dim,
        case.signs,
        case.mass,
        [(&profiles[0], &mods[0]), (&profiles[1], &mods[1]), (&profiles[2], &mods[2])],
        case.grid,
        0.0,
    ))
}

/// Sweep over low frequencies at fixed `H`. The right-hand side uses
/// `‖φ_i‖`, which is the V² norm of a free wave. Passes when every ratio
/// stays within `×4` of the first one.
pub fn verify_trilinear(cases: &[TrilinearCase]) -> Result<VerificationRecord> {
    let Some(first) = cases.first() else {
        return Err(Error::InvalidArgument("empty trilinear sweep".into()));
    };
    let mut ratios = Vec::with_capacity(cases.len());
    for case in cases {
        let mut worst = 0.0f64;
        for t in 0..case.trials {
            let (i, norms) = trilinear_integral(case, t)?;
            let rhs = case.low.as_f64().powf(case.s) * norms.iter().product::<f64>();
            worst = worst.max(i.norm() / (case.high.as_f64() * rhs));
        }
        ratios.push(worst);
    }
    let lows: Vec<u64> = cases.iter().map(|c| c.low.value()).collect();
    let highs: Vec<u64> = cases.iter().map(|c| c.high.value()).collect();
    let mut rec = VerificationRecord::new("trilinear", "(1/H)|int u_L v_H' w_H| <= C L^s |u_L| |v_H'| |w_H|")
        .param("dim", first.dim)
        .param("signs", first.signs)
        .param("s", first.s)
        .param("low", lows)
        .param("high", highs)
        .param("grid", first.grid)
        .param("random_phases", first.random_phases)
        .with_ratios(ratios);
    rec.seed = Some(first.seed);
    rec.passed = rec.ratios[0] > 0.0 && rec.constant <= 4.0 * rec.ratios[0];
    Ok(rec)
}
