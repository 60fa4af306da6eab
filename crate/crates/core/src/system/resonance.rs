use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `(2·min m_i > max m_i, 2·min − max)`.
pub fn check_nonresonance(masses: &[f64]) -> Result<(bool, f64)> {
    if masses.is_empty() {
        return Err(Error::InvalidArgument("empty mass list".into()));
    }
    if let Some(&m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(Error::NonPositiveMass(m));
    }
    let min = masses.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = masses.iter().cloned().fold(0.0, f64::max);
    let margin = 2.0 * min - max;
    Ok((margin > 0.0, margin))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `⟨ξ⟩_m + ⟨η⟩_n − ⟨ξ+η⟩_o` for `triple = (m, n, o)`.
///
/// Evaluated as `((a+b)² − c²)/(a+b+c)` with the numerator expanded, which
/// avoids cancellation at large frequencies.
pub fn resonance_function(triple: [f64; 3], xi: &[f64], eta: &[f64]) -> f64 {
    let [m, n, o] = triple;
    let xx = dot(xi, xi);
    let ee = dot(eta, eta);
    let xe = dot(xi, eta);
    let a = (m * m + xx).sqrt();
    let b = (n * n + ee).sqrt();
    let c = (o * o + xx + ee + 2.0 * xe).max(0.0).sqrt();
    (m * m + n * n - o * o - 2.0 * xe + 2.0 * a * b) / (a + b + c)
}

/// Resonance values at a list of frequency pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonanceProbe {
    pub triple: [f64; 3],
    pub samples: Vec<(Vec<f64>, Vec<f64>)>,
    pub values: Vec<f64>,
}

impl ResonanceProbe {
    pub fn evaluate(triple: [f64; 3], samples: Vec<(Vec<f64>, Vec<f64>)>) -> Self {
        let values = samples.iter().map(|(x, e)| resonance_function(triple, x, e)).collect();
        ResonanceProbe { triple, samples, values }
    }

    /// `value · ⟨min(|ξ|, |η|, |ξ+η|)⟩` per sample.
    pub fn weighted(&self) -> Vec<f64> {
        self.samples
            .iter()
            .zip(&self.values)
            .map(|((x, e), v)| {
                let s: Vec<f64> = x.iter().zip(e).map(|(a, b)| a + b).collect();
                let low = dot(x, x).min(dot(e, e)).min(dot(&s, &s));
                v * (1.0 + low).sqrt()
            })
            .collect()
    }

    /// Smallest weighted value and its sample index.
    pub fn min_weighted(&self) -> Option<(usize, f64)> {
        self.weighted().into_iter().enumerate().min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn nonresonance_condition() {
        assert_eq!(check_nonresonance(&[1.0, 1.0, 1.0]).unwrap(), (true, 1.0));
        assert_eq!(check_nonresonance(&[1.0, 1.0, 2.0]).unwrap(), (false, 0.0));
        let (ok, margin) = check_nonresonance(&[1.0, 1.2, 1.9]).unwrap();
        assert!(ok && (margin - 0.1).abs() < 1e-12);
        assert!(check_nonresonance(&[]).is_err());
        assert!(check_nonresonance(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn spot_values() {
        assert_eq!(resonance_function([1.0, 1.0, 2.0], &[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert_eq!(resonance_function([1.0, 1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]), 1.0);
        let v = resonance_function([1.0, 1.0, 1.0], &[1.0, 0.0], &[1.0, 0.0]);
        let hand = 2.0 * 2f64.sqrt() - 5f64.sqrt();
        assert!((v - hand).abs() < 1e-15);
        assert!((v - 0.59240).abs() < 1e-4);
    }

    #[test]
    fn probe_weights() {
        let p = ResonanceProbe::evaluate([1.0; 3], vec![(vec![1.0, 0.0], vec![1.0, 0.0]), (vec![0.0, 0.0], vec![0.0, 0.0])]);
        let w = p.weighted();
        assert!((w[0] - (2.0 * 2f64.sqrt() - 5f64.sqrt()) * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(w[1], 1.0);
        assert_eq!(p.min_weighted().unwrap().0, 0);
    }

    proptest! {
        #[test]
        fn symmetric_in_first_two_slots(
            m in 0.1f64..5.0, n in 0.1f64..5.0, o in 0.1f64..5.0,
            x in prop::collection::vec(-50.0f64..50.0, 3),
            e in prop::collection::vec(-50.0f64..50.0, 3),
        ) {
            let a = resonance_function([m, n, o], &x, &e);
            let b = resonance_function([n, m, o], &e, &x);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn stable_form_matches_direct(
            x in prop::collection::vec(-20.0f64..20.0, 2),
            e in prop::collection::vec(-20.0f64..20.0, 2),
        ) {
            let br = |v: &[f64], m: f64| (m * m + dot(v, v)).sqrt();
            let s: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + b).collect();
            let direct = br(&x, 1.0) + br(&e, 1.2) - br(&s, 1.9);
            prop_assert!((resonance_function([1.0, 1.2, 1.9], &x, &e) - direct).abs() < 1e-10);
        }

        #[test]
        fn positive_for_nonresonant_triple(
            x in prop::collection::vec(-100.0f64..100.0, 3),
            e in prop::collection::vec(-100.0f64..100.0, 3),
        ) {
            prop_assert!(resonance_function([1.0, 1.2, 1.9], &x, &e) > 0.0);
        }
    }
}
