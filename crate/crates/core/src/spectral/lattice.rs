use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

/// Periodic box `[0, L)^dim` sampled on `points` nodes per axis.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub box_length: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, box_length: f64, points: usize) -> Result<Self> {
        let spec = GridSpec { dim, box_length, points };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidGrid(format!("dimension {} outside 1..=3", self.dim)));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {}", self.box_length)));
        }
        if self.points < 8 || !self.points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{} points per axis; need a power of two >= 8",
                self.points
            )));
        }
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points as f64
    }

    /// `L^dim`, the weight turning `Σ|c_k|²` into `‖u‖²_{L²}`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }
}

struct LatticeInner {
    spec: GridSpec,
    modes: Vec<[i64; 3]>,
    norm2: Vec<f64>,
    dealias: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Frequency lattice `ξ_k = 2πk/L` together with cached FFT plans.
///
/// Cheap to clone; fields built on clones of the same lattice are compatible.
#[derive(Clone)]
pub struct FrequencyLattice(Arc<LatticeInner>);

impl fmt::Debug for FrequencyLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyLattice").field("spec", &self.0.spec).finish()
    }
}

impl PartialEq for FrequencyLattice {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

#[inline]
fn signed_mode(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

impl FrequencyLattice {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.points;
        let total = spec.total_points();
        let mut modes = Vec::with_capacity(total);
        for flat in 0..total {
            let mut k = [0i64; 3];
            let mut rest = flat;
            for axis in (0..spec.dim).rev() {
                k[axis] = signed_mode(rest % n, n);
                rest /= n;
            }
            modes.push(k);
        }
        let scale = 2.0 * PI / spec.box_length;
        let norm2 = modes
            .iter()
            .map(|k| k.iter().map(|&ki| (scale * ki as f64).powi(2)).sum())
            .collect();
        let dealias = modes
            .iter()
            .map(|k| k[..spec.dim].iter().all(|&ki| 3 * ki.unsigned_abs() < n as u64))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(FrequencyLattice(Arc::new(LatticeInner {
            spec,
            modes,
            norm2,
            dealias,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.0.spec
    }

    pub fn dim(&self) -> usize {
        self.0.spec.dim
    }

    pub fn len(&self) -> usize {
        self.0.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.modes.is_empty()
    }

    /// Integer mode vector of a flat index (unused axes are zero).
    #[inline]
    pub fn mode(&self, index: usize) -> [i64; 3] {
        self.0.modes[index]
    }

    /// Flat index of an integer mode, if it lies on the lattice.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        let n = self.0.spec.points as i64;
        if k.len() != self.dim() {
            return None;
        }
        let mut flat = 0usize;
        for &ki in k {
            if ki < -n / 2 || ki >= n / 2 {
                return None;
            }
            flat = flat * n as usize + ki.rem_euclid(n) as usize;
        }
        Some(flat)
    }

    /// Frequency vector `ξ_k`.
    #[inline]
    pub fn frequency(&self, index: usize) -> [f64; 3] {
        let scale = 2.0 * PI / self.0.spec.box_length;
        let k = self.0.modes[index];
        [scale * k[0] as f64, scale * k[1] as f64, scale * k[2] as f64]
    }

    #[inline]
    pub fn norm2(&self, index: usize) -> f64 {
        self.0.norm2[index]
    }

    pub fn norms2(&self) -> &[f64] {
        &self.0.norm2
    }

    /// Largest `|ξ|` present on the lattice.
    pub fn max_frequency(&self) -> f64 {
        self.0.norm2.iter().cloned().fold(0.0, f64::max).sqrt()
    }

    /// Largest `|ξ|` kept by the two-thirds dealiasing rule.
    pub fn max_dealiased_frequency(&self) -> f64 {
        self.0
            .norm2
            .iter()
            .zip(&self.0.dealias)
            .filter(|(_, &keep)| keep)
            .map(|(&r2, _)| r2)
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Two-thirds rule: keep modes with `|k_j| < N/3` on every axis.
    #[inline]
    pub fn is_dealiased(&self, index: usize) -> bool {
        self.0.dealias[index]
    }

    /// Physical coordinates of a grid node (nodes at `j·L/N`).
    pub fn coordinates(&self, index: usize) -> [f64; 3] {
        let spec = &self.0.spec;
        let h = spec.spacing();
        let mut x = [0.0; 3];
        let mut rest = index;
        for axis in (0..spec.dim).rev() {
            x[axis] = (rest % spec.points) as f64 * h;
            rest /= spec.points;
        }
        x
    }

    pub(crate) fn fft_in_place(&self, data: &mut [Complex64], inverse: bool) {
        let spec = &self.0.spec;
        let n = spec.points;
        let plan = if inverse { &self.0.inv } else { &self.0.fwd };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Contiguous last axis.
        plan.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..spec.dim - 1 {
            let stride = n.pow((spec.dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0, 1.0, 16).is_err());
        assert!(GridSpec::new(4, 1.0, 16).is_err());
        assert!(GridSpec::new(2, 0.0, 16).is_err());
        assert!(GridSpec::new(2, 1.0, 12).is_err());
        assert!(GridSpec::new(2, 1.0, 4).is_err());
        assert!(GridSpec::new(3, 2.0, 8).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let lat = FrequencyLattice::new(GridSpec::new(3, 2.0 * PI, 8).unwrap()).unwrap();
        for i in 0..lat.len() {
            let k = lat.mode(i);
            assert_eq!(lat.index_of(&k[..3]), Some(i));
            let xi = lat.frequency(i);
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            assert!((r2 - lat.norm2(i)).abs() < 1e-12);
        }
        assert_eq!(lat.index_of(&[4, 0, 0]), None);
        assert_eq!(lat.mode(lat.index_of(&[-4, 1, 2]).unwrap()), [-4, 1, 2]);
    }

    #[test]
    fn dealias_mask_is_two_thirds() {
        let lat = FrequencyLattice::new(GridSpec::new(1, 2.0 * PI, 16).unwrap()).unwrap();
        let kept: Vec<i64> = (0..16).filter(|&i| lat.is_dealiased(i)).map(|i| lat.mode(i)[0]).collect();
        assert_eq!(kept, vec![0, 1, 2, 3, 4, 5, -5, -4, -3, -2, -1]);
        assert!((lat.max_dealiased_frequency() - 5.0).abs() < 1e-12);
        assert!((lat.max_frequency() - 8.0).abs() < 1e-12);
    }
}
