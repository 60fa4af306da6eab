use super::cutoff::{lp_weight, Dyadic};
use super::field::SpectralField;
use super::lattice::FrequencyLattice;
use super::Sign;
use crate::{Complex64, Error, Result};

/// `⟨ξ⟩_m = √(m² + |ξ|²)` from `|ξ|²`.
#[inline]
pub fn bracket(norm2: f64, mass: f64) -> f64 {
    (mass * mass + norm2).sqrt()
}

/// Multiplies the coefficient at `ξ` by `⟨ξ⟩_m^power`.
pub fn bracket_multiplier(f: &SpectralField, mass: f64, power: f64) -> Result<SpectralField> {
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    Ok(f.map_radial(|r2| Complex64::new((mass * mass + r2).powf(0.5 * power), 0.0)))
}

/// Smooth Littlewood-Paley projection `P_N f`.
pub fn lp_project(f: &SpectralField, band: Dyadic) -> SpectralField {
    f.map_radial(|r2| Complex64::new(lp_weight(band, r2.sqrt()), 0.0))
}

/// Dyadic labels `0, 1, 2, …, N_max` with `N_max` the first power of two
/// `≥` the largest lattice frequency; `Σ P_N = Id` over this list.
pub fn dyadic_bands(lattice: &FrequencyLattice) -> Vec<Dyadic> {
    Dyadic::up_to(lattice.max_frequency())
}

/// `‖f‖_{H^s} = ‖⟨D⟩_m^s f‖_{L²}`.
pub fn sobolev_norm(f: &SpectralField, s: f64, mass: f64) -> f64 {
    let m2 = mass * mass;
    let sum: f64 = f
        .coefficients()
        .iter()
        .zip(f.lattice().norms2())
        .map(|(c, &r2)| (m2 + r2).powf(s) * c.norm_sqr())
        .sum();
    (sum * f.lattice().spec().volume()).sqrt()
}

/// `e^{±it⟨D⟩_m} f`.
pub fn free_propagate(f: &SpectralField, t: f64, mass: f64, sign: Sign) -> SpectralField {
    let st = sign.value() * t;
    f.map_radial(|r2| Complex64::from_polar(1.0, st * bracket(r2, mass)))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::GridSpec;

    fn random_field(lat: &FrequencyLattice, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..lat.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        SpectralField::new(lat, coeffs).unwrap()
    }

    #[test]
    fn bracket_at_three_four() {
        // Box of length 2π puts ξ = k on the integer lattice.
        let lat = FrequencyLattice::new(GridSpec::new(2, 2.0 * PI, 16).unwrap()).unwrap();
        let mut f = SpectralField::zeros(&lat);
        let i = lat.index_of(&[3, 4]).unwrap();
        let z = lat.index_of(&[0, 0]).unwrap();
        f.coefficients_mut()[i] = Complex64::new(1.0, 0.0);
        f.coefficients_mut()[z] = Complex64::new(1.0, 0.0);
        let g = bracket_multiplier(&f, 5.0, 1.0).unwrap();
        assert!((g.coefficients()[i].re - 50f64.sqrt()).abs() < 1e-12);
        assert!((g.coefficients()[i].re - 7.0710678).abs() < 1e-7);
        let g1 = bracket_multiplier(&f, 1.0, 1.0).unwrap();
        assert_eq!(g1.coefficients()[z].re, 1.0);
        assert!(matches!(bracket_multiplier(&f, 0.0, 1.0), Err(Error::NonPositiveMass(_))));
    }

    #[test]
    fn lp_partition_of_unity_on_random_field() {
        for (dim, n) in [(1, 64), (2, 32), (3, 16)] {
            let lat = FrequencyLattice::new(GridSpec::new(dim, 7.0, n).unwrap()).unwrap();
            let f = random_field(&lat, dim as u64);
            let mut sum = SpectralField::zeros(&lat);
            for band in dyadic_bands(&lat) {
                sum += &lp_project(&f, band);
            }
            assert!(sum.max_abs_diff(&f) < 1e-10);
        }
    }

    #[test]
    fn lp_disjoint_support() {
        let lat = FrequencyLattice::new(GridSpec::new(1, 2.0 * PI, 32).unwrap()).unwrap();
        let mut f = SpectralField::zeros(&lat);
        f.coefficients_mut()[lat.index_of(&[4]).unwrap()] = Complex64::new(1.0, 0.0);
        assert_eq!(lp_project(&f, Dyadic::ONE).l2_norm(), 0.0);
    }

    #[test]
    fn sobolev_two_mode_hand_sum() {
        let lat = FrequencyLattice::new(GridSpec::new(1, 2.0 * PI, 16).unwrap()).unwrap();
        let mut f = SpectralField::zeros(&lat);
        f.coefficients_mut()[lat.index_of(&[0]).unwrap()] = Complex64::new(1.0, 0.0);
        assert!((sobolev_norm(&f, 3.7, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
        f.coefficients_mut()[lat.index_of(&[2]).unwrap()] = Complex64::new(0.0, 3.0);
        // 2π (1·1 + 5·9) for s = 1, m = 1.
        assert!((sobolev_norm(&f, 1.0, 1.0) - (2.0 * PI * 46.0).sqrt()).abs() < 1e-12);
        assert_eq!(sobolev_norm(&SpectralField::zeros(&lat), 1.0, 1.0), 0.0);
    }

    #[test]
    fn free_propagation_properties() {
        let lat = FrequencyLattice::new(GridSpec::new(2, 9.0, 32).unwrap()).unwrap();
        let f = random_field(&lat, 7);
        assert_eq!(free_propagate(&f, 0.0, 1.0, Sign::Plus).max_abs_diff(&f), 0.0);
        let g = free_propagate(&f, 7.3, 1.0, Sign::Minus);
        assert!((g.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
        let two = free_propagate(&free_propagate(&f, 1.25, 1.0, Sign::Plus), 2.5, 1.0, Sign::Plus);
        let once = free_propagate(&f, 3.75, 1.0, Sign::Plus);
        assert!(two.max_abs_diff(&once) < 1e-12);
        let back = free_propagate(&g, 7.3, 1.0, Sign::Plus);
        assert!(back.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn half_period_phase() {
        let lat = FrequencyLattice::new(GridSpec::new(1, 2.0 * PI, 16).unwrap()).unwrap();
        let mut f = SpectralField::zeros(&lat);
        let i = lat.index_of(&[2]).unwrap();
        f.coefficients_mut()[i] = Complex64::new(1.0, 0.0);
        let t = PI / 5f64.sqrt();
        let g = free_propagate(&f, t, 1.0, Sign::Plus);
        assert!((g.coefficients()[i] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }
}
