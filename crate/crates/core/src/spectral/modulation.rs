use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::cutoff::{chi, lp_weight, Dyadic};
use super::field::SpectralField;
use super::multiplier::bracket;
use super::Sign;
use crate::{Complex64, Error, Result};

/// Relative tolerance on the spacing of sample times.
const UNIFORM_TOL: f64 = 1e-9;

/// Uniformly sampled field `t ↦ u(t)` on a common lattice.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    times: Vec<f64>,
    snapshots: Vec<SpectralField>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    /// Weight of sample `j` out of `n`.
    pub fn weight(self, j: usize, n: usize) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Hann => (PI * j as f64 / (n - 1) as f64).sin().powi(2),
        }
    }
}

/// Checks that `times` has at least two strictly increasing, evenly spaced entries.
pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {}", times.len())));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("sample times"));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::NonUniformTimes);
    }
    for (j, &t) in times.iter().enumerate() {
        if (t - (times[0] + j as f64 * dt)).abs() > UNIFORM_TOL * dt * (j.max(1) as f64) {
            return Err(Error::NonUniformTimes);
        }
    }
    Ok(dt)
}

impl SpaceTimeField {
    pub fn new(times: Vec<f64>, snapshots: Vec<SpectralField>) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(Error::SizeMismatch { expected: times.len(), actual: snapshots.len() });
        }
        uniform_step(&times)?;
        for s in &snapshots[1..] {
            snapshots[0].ensure_compatible(s)?;
        }
        Ok(SpaceTimeField { times, snapshots })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[SpectralField] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<SpectralField> {
        self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64
    }

    pub fn windowed(&self, window: Window) -> SpaceTimeField {
        let n = self.len();
        let snapshots = self
            .snapshots
            .iter()
            .enumerate()
            .map(|(j, s)| s.scaled(Complex64::new(window.weight(j, n), 0.0)))
            .collect();
        SpaceTimeField { times: self.times.clone(), snapshots }
    }

    /// Riemann-sum `‖u‖_{L²_{t,x}} = (dt Σ_j ‖u(t_j)‖²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.dt() * self.snapshots.iter().map(|s| s.l2_norm_sq()).sum::<f64>()).sqrt()
    }

    pub fn difference(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch { expected: self.len(), actual: other.len() });
        }
        let snapshots = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| {
                a.ensure_compatible(b)?;
                Ok(a - b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpaceTimeField { times: self.times.clone(), snapshots })
    }
}

/// Which part of the modulation axis `σ = τ ∓ ⟨ξ⟩` to keep.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "m")]
pub enum ModulationBand {
    /// `Q_M`, weight `ψ_M(σ)`.
    Band(Dyadic),
    /// `Q_{<M} = Σ_{M'<M} Q_{M'}`, weight `χ(2σ/M)`.
    Below(Dyadic),
    /// `Q_{≥M} = Id − Q_{<M}`.
    AtLeast(Dyadic),
}

impl ModulationBand {
    pub fn weight(self, sigma: f64) -> f64 {
        match self {
            ModulationBand::Band(m) => lp_weight(m, sigma.abs()),
            ModulationBand::Below(m) if m.is_zero() => 0.0,
            ModulationBand::Below(m) => chi(2.0 * sigma / m.as_f64()),
            ModulationBand::AtLeast(m) if m.is_zero() => 1.0,
            ModulationBand::AtLeast(m) => 1.0 - chi(2.0 * sigma / m.as_f64()),
        }
    }
}

/// Applies `Q^±` along the time axis: temporal DFT per spatial mode,
/// multiplication by the band weight at `σ = τ ∓ ⟨ξ⟩_m`, inverse DFT.
///
/// The sampled horizon is treated as one period in time; apply a window
/// beforehand to control leakage.
pub fn modulation_project(u: &SpaceTimeField, band: ModulationBand, sign: Sign, mass: f64) -> SpaceTimeField {
    let nt = u.len();
    let dt = u.dt();
    let lattice = u.snapshots[0].lattice().clone();
    let ns = lattice.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nt);
    let inv = planner.plan_fft_inverse(nt);
    let taus: Vec<f64> = (0..nt)
        .map(|j| {
            let js = if j < nt.div_ceil(2) { j as f64 } else { j as f64 - nt as f64 };
            2.0 * PI * js / (nt as f64 * dt)
        })
        .collect();
    let scale = 1.0 / nt as f64;
    let columns: Vec<Vec<Complex64>> = (0..ns)
        .into_par_iter()
        .map(|k| {
            let mut col: Vec<Complex64> = u.snapshots.iter().map(|s| s.coefficients()[k]).collect();
            if col.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                return col;
            }
            fwd.process(&mut col);
            let w = sign.value() * bracket(lattice.norm2(k), mass);
            for (c, &tau) in col.iter_mut().zip(&taus) {
                *c *= band.weight(tau - w) * scale;
            }
            inv.process(&mut col);
            col
        })
        .collect();
    let snapshots = (0..nt)
        .map(|j| {
            let coeffs = columns.iter().map(|col| col[j]).collect();
            SpectralField::new(&lattice, coeffs).expect("finite coefficients")
        })
        .collect();
    SpaceTimeField { times: u.times.clone(), snapshots }
}
