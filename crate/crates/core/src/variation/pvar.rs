use rayon::prelude::*;

use crate::spectral::SpectralField;
use crate::{Complex64, Error, Result};

/// Values a path can take: anything with a distance and a norm.
pub trait PathValue: Sync {
    fn distance(&self, other: &Self) -> f64;
    /// Distance to zero.
    fn norm(&self) -> f64;
}

impl PathValue for f64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }

    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl PathValue for Complex64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

/// Euclidean vectors.
impl PathValue for Vec<f64> {
    fn distance(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    fn norm(&self) -> f64 {
        self.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// `L²` distance on the box.
impl PathValue for SpectralField {
    fn distance(&self, other: &Self) -> f64 {
        let s: f64 = self
            .coefficients()
            .iter()
            .zip(other.coefficients())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (s * self.lattice().spec().volume()).sqrt()
    }

    fn norm(&self) -> f64 {
        self.l2_norm()
    }
}

/// A path sampled at increasing times, optionally preceded by the value 0
/// at `t = −∞`.
#[derive(Clone, Debug)]
pub struct SampledPath<T> {
    times: Vec<f64>,
    values: Vec<T>,
    lead_zero: bool,
}

impl<T: PathValue> SampledPath<T> {
    pub fn new(times: Vec<f64>, values: Vec<T>, lead_zero: bool) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::SizeMismatch { expected: times.len(), actual: values.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("sample times must increase strictly".into()));
        }
        Ok(SampledPath { times, values, lead_zero })
    }

    /// Path sampled at `0, 1, 2, …`.
    pub fn from_values(values: Vec<T>, lead_zero: bool) -> Self {
        let times = (0..values.len()).map(|j| j as f64).collect();
        SampledPath { times, values, lead_zero }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn lead_zero(&self) -> bool {
        self.lead_zero
    }

    /// Number of points including the prepended zero.
    pub fn effective_len(&self) -> usize {
        self.values.len() + usize::from(self.lead_zero)
    }

    /// Distance between effective points `i < j` (point 0 is the zero when `lead_zero`).
    fn distance(&self, i: usize, j: usize) -> f64 {
        let off = usize::from(self.lead_zero);
        if self.lead_zero && i == 0 {
            self.values[j - off].norm()
        } else {
            self.values[i - off].distance(&self.values[j - off])
        }
    }
}

/// Chosen partition points, as indices into the effective sequence
/// (index 0 is the prepended zero when the path has one).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Variation {
    /// `(sup Σ_k ‖v(t_k) − v(t_{k−1})‖^p)^{1/p}`.
    pub value: f64,
    /// A partition attaining the supremum.
    pub partition: Partition,
}

/// Exact p-variation over all partitions of the sample points.
///
/// `best[j] = max(0, max_{i<j} best[i] + d(i, j)^p)` is the largest sum of
/// a partition ending at point `j`; the answer is `max_j best[j]`.
pub fn p_variation<T: PathValue>(path: &SampledPath<T>, p: f64) -> Result<Variation> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::ExponentRange(format!("p = {p} must be finite and >= 1")));
    }
    let k = path.effective_len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {k}")));
    }
    // Row j holds d(i, j)^p for i < j.
    let table: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|j| (0..j).map(|i| path.distance(i, j).powf(p)).collect())
        .collect();
    let mut best = vec![0.0f64; k];
    let mut pred: Vec<Option<usize>> = vec![None; k];
    for j in 1..k {
        for (i, &d) in table[j].iter().enumerate() {
            let cand = best[i] + d;
            if cand > best[j] {
                best[j] = cand;
                pred[j] = Some(i);
            }
        }
    }
    let (mut end, total) = best
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (j, &b)| if b > acc.1 { (j, b) } else { acc });
    let mut indices = vec![end];
    while let Some(i) = pred[end] {
        indices.push(i);
        end = i;
    }
    indices.reverse();
    Ok(Variation { value: total.powf(1.0 / p), partition: Partition { indices } })
}
