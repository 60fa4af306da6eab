use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{jb, spread, stream, VerificationRecord};
use crate::spectral::{chi, psi, Dyadic, Sign};
use crate::{Complex64, Error, Result};

/// Smooth frequency envelope of a random initial datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FrequencyProfile {
    /// `ψ(|ξ| / scale)`, supported in `scale/2 ≤ |ξ| ≤ 2 scale`.
    Annulus { scale: f64 },
    /// `χ(2|ξ − center| / radius)`, supported in the ball of that radius.
    Ball { center: Vec<f64>, radius: f64 },
}

impl FrequencyProfile {
    pub fn envelope(&self, xi: &[f64]) -> f64 {
        match self {
            FrequencyProfile::Annulus { scale } => psi(norm(xi) / scale),
            FrequencyProfile::Ball { center, radius } => {
                let d2: f64 = xi.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                chi(2.0 * d2.sqrt() / radius)
            }
        }
    }

    /// Length scale of the profile, used to scale the random modulation.
    pub fn scale(&self) -> f64 {
        match self {
            FrequencyProfile::Annulus { scale } => *scale,
            FrequencyProfile::Ball { radius, .. } => *radius,
        }
    }

    fn bounding_box(&self, dim: usize) -> Vec<(f64, f64)> {
        match self {
            FrequencyProfile::Annulus { scale } => vec![(-2.0 * scale, 2.0 * scale); dim],
            FrequencyProfile::Ball { center, radius } => center.iter().map(|c| (c - radius, c + radius)).collect(),
        }
    }
}

/// `A(ξ) = Σ_j c_j e^{i ξ·x_j / scale}`: a few wave packets with complex
/// Gaussian amplitudes at Gaussian positions.
#[derive(Clone, Debug)]
pub(crate) struct Modulation {
    pub(crate) coeffs: Vec<Complex64>,
    pub(crate) points: Vec<Vec<f64>>,
    pub(crate) inv_scale: f64,
}

impl Modulation {
    const PACKETS: usize = 3;

    pub(crate) fn draw(rng: &mut impl Rng, dim: usize, scale: f64) -> Self {
        let coeffs = (0..Self::PACKETS)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let points = (0..Self::PACKETS)
            .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        Modulation { coeffs, points, inv_scale: 1.0 / scale }
    }

    pub(crate) fn constant() -> Self {
        Modulation { coeffs: vec![Complex64::new(1.0, 0.0)], points: vec![vec![0.0; 3]], inv_scale: 0.0 }
    }

    pub(crate) fn value(&self, xi: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&self.points)
            .map(|(c, x)| {
                let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() * self.inv_scale;
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Which regime of the bilinear estimate a case exercises.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BilinearMode {
    /// `φ`, `ψ` in the annuli `M`, `N`; bound `L^{(n−1)/2}`.
    Coarse,
    /// `φ`, `ψ` in balls of radius `O` at `±M e₁` with `M = N`; bound
    /// `H^{1/2} L^{(n−2)/2}`.
    Sharp,
}

/// One configuration of `‖P_O(u_M v_N)‖_{L²(ℝ×ℝⁿ)}` with free waves
/// `u_M = e^{±₁it⟨D⟩}φ_M`, `v_N = e^{±₂it⟨D⟩}ψ_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearCase {
    pub dim: usize,
    pub m: Dyadic,
    pub n: Dyadic,
    pub o: Dyadic,
    pub mode: BilinearMode,
    pub signs: [Sign; 2],
    pub masses: [f64; 2],
    pub trials: usize,
    pub seed: u64,
    /// Monte Carlo samples of the output frequency per trial.
    pub zeta_samples: usize,
    /// Grid points per axis over the support of `φ̂`.
    pub grid: usize,
}

impl BilinearCase {
    pub fn new(dim: usize, m: Dyadic, n: Dyadic, o: Dyadic, mode: BilinearMode, signs: [Sign; 2]) -> Self {
        BilinearCase {
            dim,
            m,
            n,
            o,
            mode,
            signs,
            masses: [1.0, 1.0],
            trials: 3,
            seed: 1,
            zeta_samples: 256,
            grid: 32,
        }
    }

    pub fn low(&self) -> f64 {
        self.m.min(self.n).min(self.o).as_f64()
    }

    pub fn high(&self) -> f64 {
        self.m.max(self.n).max(self.o).as_f64()
    }

    fn comparable(&self) -> bool {
        let (a, b) = (self.m.as_f64(), self.n.as_f64());
        a.max(b) <= 2.0 * a.min(b)
    }

    /// Right-hand side of the estimate without the data norms.
    pub fn bound(&self) -> f64 {
        let (l, h, n) = (self.low(), self.high(), self.dim as f64);
        if self.comparable() {
            h.sqrt() * l.powf((n - 2.0) / 2.0)
        } else {
            l.powf((n - 1.0) / 2.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.dim) {
            return Err(Error::InvalidArgument(format!("bilinear dimension {} outside 1..=4", self.dim)));
        }
        if self.m.is_zero() || self.n.is_zero() || self.o.is_zero() {
            return Err(Error::InvalidArgument("bilinear bands must be at least 1".into()));
        }
        if self.masses.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::NonPositiveMass(self.masses[0].min(self.masses[1])));
        }
        if self.mode == BilinearMode::Sharp && self.m != self.n {
            return Err(Error::InvalidArgument("sharp mode needs M = N".into()));
        }
        if self.grid < 8 || self.zeta_samples == 0 || self.trials == 0 {
            return Err(Error::UnderResolved(format!(
                "grid {} (need ≥ 8), zeta samples {}, trials {}",
                self.grid, self.zeta_samples, self.trials
            )));
        }
        Ok(())
    }

    fn profiles(&self) -> (FrequencyProfile, FrequencyProfile) {
        match self.mode {
            BilinearMode::Coarse => (
                FrequencyProfile::Annulus { scale: self.m.as_f64() },
                FrequencyProfile::Annulus { scale: self.n.as_f64() },
            ),
            BilinearMode::Sharp => {
                let mut c = vec![0.0; self.dim];
                c[0] = self.m.as_f64();
                let radius = self.o.as_f64();
                let minus: Vec<f64> = c.iter().map(|v| -v).collect();
                (FrequencyProfile::Ball { center: c, radius }, FrequencyProfile::Ball { center: minus, radius })
            }
        }
    }
}

/// Outcome of one random draw.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearTrial {
    /// `‖P_O(u v)‖_{L²(ℝ×ℝⁿ)}`.
    pub norm: f64,
    pub phi_norm: f64,
    pub psi_norm: f64,
    /// `norm / (‖φ‖ ‖ψ‖)`.
    pub ratio: f64,
    /// `ratio / bound`.
    pub normalized: f64,
    /// Monte Carlo standard error of `ratio`.
    pub ratio_error: f64,
}

/// Frequency-side evaluation of the space-time norm.
///
/// With `f̂(ξ) = ∫ f e^{−ixξ} dx`, the spatial transform of `u v` at `ζ` is
/// `(2π)^{−n} g_ζ(t)` where `g_ζ(t) = ∫ e^{itΩ} φ̂(ξ) ψ̂(ζ−ξ) dξ` and
/// `Ω = ±₁⟨ξ⟩ ±₂⟨ζ−ξ⟩`. Then `∫|g_ζ|² dt = 2π ∫|G_ζ(τ)|² dτ` with `G_ζ`
/// the density of `φ̂ ψ̂(ζ−·)` pushed forward by `Ω`, so
///
/// ```text
/// ‖P_O(uv)‖² / (‖φ‖²‖ψ‖²) = (2π)^{1−n} ∫ψ_O(ζ)² ∫|G_ζ|² dτ dζ / (∫|φ̂|² ∫|ψ̂|²).
/// ```
///
/// `G_ζ` is estimated on a regular `ξ` grid by cloud-in-cell binning in `τ`
/// with bins twice the mean phase change across a cell.
pub(crate) struct Engine {
    dim: usize,
    signs: [f64; 2],
    masses: [f64; 2],
    /// Grid points with nonzero `φ̂` and their weights `φ̂(ξ) hⁿ`.
    points: Vec<([f64; 3], Complex64)>,
    cell: f64,
    psi_profile: FrequencyProfile,
    psi_mod: Modulation,
    /// `∫|φ̂|²`, `∫|ψ̂|²`.
    pub(crate) phi_sq: f64,
    pub(crate) psi_sq: f64,
}

impl Engine {
    fn new(
        dim: usize,
        signs: [Sign; 2],
        masses: [f64; 2],
        profiles: (FrequencyProfile, FrequencyProfile),
        mods: (Modulation, Modulation),
        grid: usize,
    ) -> Self {
        let phi_box = profiles.0.bounding_box(dim);
        let h = (phi_box[0].1 - phi_box[0].0) / grid as f64;
        let vol = h.powi(dim as i32);
        let total = grid.pow(dim as u32);
        let mut points = Vec::new();
        let mut phi_sq = 0.0;
        for idx in 0..total {
            let mut xi = [0.0; 3];
            let mut rem = idx;
            for (d, b) in phi_box.iter().enumerate() {
                xi[d] = b.0 + h * ((rem % grid) as f64 + 0.5);
                rem /= grid;
            }
            let env = profiles.0.envelope(&xi[..dim]);
            if env == 0.0 {
                continue;
            }
            let w = mods.0.value(&xi[..dim]) * env;
            phi_sq += w.norm_sqr() * vol;
            points.push((xi, w * vol));
        }
        // ∫|ψ̂|² on a grid of the same resolution relative to its own support.
        let psi_box = profiles.1.bounding_box(dim);
        let hp = (psi_box[0].1 - psi_box[0].0) / grid as f64;
        let mut psi_sq = 0.0;
        for idx in 0..total {
            let mut eta = [0.0; 3];
            let mut rem = idx;
            for (d, b) in psi_box.iter().enumerate() {
                eta[d] = b.0 + hp * ((rem % grid) as f64 + 0.5);
                rem /= grid;
            }
            let env = profiles.1.envelope(&eta[..dim]);
            if env != 0.0 {
                psi_sq += (mods.1.value(&eta[..dim]) * env).norm_sqr();
            }
        }
        psi_sq *= hp.powi(dim as i32);
        Engine {
            dim,
            signs: [signs[0].value(), signs[1].value()],
            masses,
            points,
            cell: h,
            psi_profile: profiles.1,
            psi_mod: mods.1,
            phi_sq,
            psi_sq,
        }
    }

    /// `∫|G_ζ(τ)|² dτ`.
    pub(crate) fn energy(&self, zeta: &[f64]) -> f64 {
        let n = self.dim;
        let mut taus = Vec::new();
        let mut weights = Vec::new();
        let (mut grad_sum, mut grad_w) = (0.0, 0.0);
        let mut eta = [0.0; 3];
        for (xi, w) in &self.points {
            for d in 0..n {
                eta[d] = zeta[d] - xi[d];
            }
            let env = self.psi_profile.envelope(&eta[..n]);
            if env == 0.0 {
                continue;
            }
            let weight = w * self.psi_mod.value(&eta[..n]) * env;
            let a = jb(xi[..n].iter().map(|v| v * v).sum(), self.masses[0]);
            let b = jb(eta[..n].iter().map(|v| v * v).sum(), self.masses[1]);
            let mut g2 = 0.0;
            for d in 0..n {
                let g = self.signs[0] * xi[d] / a - self.signs[1] * eta[d] / b;
                g2 += g * g;
            }
            let m = weight.norm();
            grad_sum += m * g2.sqrt();
            grad_w += m;
            taus.push(self.signs[0] * a + self.signs[1] * b);
            weights.push(weight);
        }
        if grad_w == 0.0 {
            return 0.0;
        }
        let lo = taus.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = taus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let eps = (2.0 * self.cell * grad_sum / grad_w).max((hi - lo) * 1e-6).max(1e-12);
        let bins = ((hi - lo) / eps).floor() as usize + 2;
        let mut acc = vec![Complex64::new(0.0, 0.0); bins];
        for (t, w) in taus.iter().zip(&weights) {
            let s = (t - lo) / eps;
            let i = (s.floor() as usize).min(bins - 2);
            let f = s - i as f64;
            acc[i] += w * (1.0 - f);
            acc[i + 1] += w * f;
        }
        acc.iter().map(|c| c.norm_sqr()).sum::<f64>() / eps
    }
}

fn ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        _ => unreachable!("dimension validated"),
    }
}

fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Evaluates trial `trial` of `case`.
pub fn bilinear_ratio(case: &BilinearCase, trial: usize) -> Result<BilinearTrial> {
    case.validate()?;
    let n = case.dim;
    let mut rng = stream(case.seed, 2 * trial as u64);
    let profiles = case.profiles();
    let mods = (Modulation::draw(&mut rng, n, profiles.0.scale()), Modulation::draw(&mut rng, n, profiles.1.scale()));
    let engine = Engine::new(n, case.signs, case.masses, profiles, mods, case.grid);
    // Output frequencies uniform in the shell O/2 ≤ |ζ| ≤ 2O where ψ_O lives.
    let o = case.o.as_f64();
    let (a, b) = (0.5 * o, 2.0 * o);
    let shell = ball_volume(n) * (b.powi(n as i32) - a.powi(n as i32));
    let mut zrng = stream(case.seed, 2 * trial as u64 + 1);
    let zetas: Vec<Vec<f64>> = (0..case.zeta_samples)
        .map(|_| {
            let dir = unit_vector(&mut zrng, n);
            let u: f64 = zrng.gen();
            let r = (a.powi(n as i32) + u * (b.powi(n as i32) - a.powi(n as i32))).powf(1.0 / n as f64);
            dir.iter().map(|d| d * r).collect()
        })
        .collect();
    let values: Vec<f64> = zetas
        .par_iter()
        .map(|z| {
            let w = psi(norm(z) / o);
            if w == 0.0 {
                0.0
            } else {
                w * w * engine.energy(z)
            }
        })
        .collect();
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0).max(1.0);
    let pref = (2.0 * std::f64::consts::PI).powi(1 - n as i32) / (engine.phi_sq * engine.psi_sq);
    let ratio_sq = pref * shell * mean;
    let ratio_sq_err = pref * shell * (var / k).sqrt();
    let two_pi_n = (2.0 * std::f64::consts::PI).powi(n as i32);
    let phi_norm = (engine.phi_sq / two_pi_n).sqrt();
    let psi_norm = (engine.psi_sq / two_pi_n).sqrt();
    let ratio = ratio_sq.sqrt();
    let ratio_error = if ratio > 0.0 { 0.5 * ratio_sq_err / ratio } else { 0.0 };
    Ok(BilinearTrial {
        norm: ratio * phi_norm * psi_norm,
        phi_norm,
        psi_norm,
        ratio,
        normalized: ratio / case.bound(),
        ratio_error,
    })
}

/// Sweep check: the per-case maximum of `ratio / bound` over trials must
/// stay within `×4` across at least six cases.
pub fn verify_bilinear(cases: &[BilinearCase]) -> Result<(VerificationRecord, Vec<Vec<BilinearTrial>>)> {
    let Some(first) = cases.first() else {
        return Err(Error::InvalidArgument("empty bilinear sweep".into()));
    };
    let mut all = Vec::with_capacity(cases.len());
    for case in cases {
        let trials = (0..case.trials).map(|t| bilinear_ratio(case, t)).collect::<Result<Vec<_>>>()?;
        all.push(trials);
    }
    let ratios: Vec<f64> = all.iter().map(|t| t.iter().map(|x| x.normalized).fold(0.0, f64::max)).collect();
    let formula = if first.comparable() { "H^(1/2) L^((n-2)/2) |phi| |psi|" } else { "L^((n-1)/2) |phi| |psi|" };
    let name = match first.mode {
        BilinearMode::Coarse => "bilinear_coarse",
        BilinearMode::Sharp => "bilinear_sharp",
    };
    let scales: Vec<[u64; 3]> = cases.iter().map(|c| [c.m.value(), c.n.value(), c.o.value()]).collect();
    let mut rec = VerificationRecord::new(name, formula)
        .param("dim", first.dim)
        .param("signs", first.signs)
        .param("masses", first.masses)
        .param("scales_mno", scales)
        .param("trials", first.trials)
        .param("zeta_samples", first.zeta_samples)
        .param("grid", first.grid)
        .with_ratios(ratios);
    rec.seed = Some(first.seed);
    let worst_err = all
        .iter()
        .flatten()
        .map(|t| if t.ratio > 0.0 { t.ratio_error / t.ratio } else { 0.0 })
        .fold(0.0, f64::max);
    rec.notes.push(format!("max relative Monte Carlo error {worst_err:.3e}"));
    rec.passed = cases.len() >= 6 && spread(&rec.ratios) <= 4.0;
    if cases.len() < 6 {
        rec.notes.push("fewer than six scales".into());
    }
    Ok((rec, all))
}
