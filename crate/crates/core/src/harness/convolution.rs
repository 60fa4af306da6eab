use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{stream, VerificationRecord};
use crate::{Complex64, Error, Result};

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Checks `‖u * v‖_{ℓ²} ≤ (sup_ζ |A ∩ (ζ − B)|)^{1/2} ‖u‖ ‖v‖` for
/// coefficient sequences supported on the lattice sets `A`, `B`.
///
/// The supremum is found by counting representations `ζ = a + b`; the
/// inequality is then tested on `trials` random complex assignments.
pub fn convolution_support_constant(a: &[Vec<i64>], b: &[Vec<i64>], trials: usize, seed: u64) -> Result<VerificationRecord> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty support set".into()));
    }
    let dim = a[0].len();
    if a.iter().chain(b).any(|p| p.len() != dim) {
        return Err(Error::InvalidArgument("points of mixed dimension".into()));
    }
    if a.len() > 10_000 || b.len() > 10_000 {
        return Err(Error::InvalidArgument("support sets limited to 1e4 points".into()));
    }
    let mut counts: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for p in a {
        for q in b {
            *counts.entry(add(p, q)).or_default() += 1;
        }
    }
    let sup = counts.values().copied().max().unwrap_or(0);
    let constant = (sup as f64).sqrt();
    let mut ratios = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = stream(seed, t as u64);
        let mut draw = |n: usize| -> Vec<Complex64> {
            (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
        };
        let u = draw(a.len());
        let v = draw(b.len());
        let mut conv: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (p, cu) in a.iter().zip(&u) {
            for (q, cv) in b.iter().zip(&v) {
                *conv.entry(add(p, q)).or_default() += cu * cv;
            }
        }
        let lhs = conv.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nu = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        ratios.push(lhs / (constant * nu * nv));
    }
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    let mut rec = VerificationRecord::new("convolution_support", "(sup |A ∩ (ζ − B)|)^(1/2) ‖u‖ ‖v‖")
        .param("size_a", a.len())
        .param("size_b", b.len())
        .param("dim", dim)
        .param("sup_count", sup)
        .param("trials", trials)
        .with_ratios(ratios);
    rec.constant = constant;
    rec.passed = worst <= 1.0 + 1e-12;
    rec.seed = Some(seed);
    rec.notes.push(format!("largest lhs/rhs = {worst:.6}"));
    Ok(rec)
}
