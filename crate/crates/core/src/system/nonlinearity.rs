use super::definition::MassSystem;
use crate::spectral::{forward_transform, inverse_transform, SpectralField};
use crate::{Complex64, Error, Result};

/// Evaluates `N_i(u_1, …, u_K)` for every component.
///
/// Inputs are truncated to the two-thirds band, multiplied pointwise on the
/// grid, and the products truncated again, so products of band-limited
/// fields carry no aliasing error.
pub fn evaluate_nonlinearity(system: &MassSystem, fields: &[SpectralField]) -> Result<Vec<SpectralField>> {
    let k = system.components();
    if fields.len() != k {
        return Err(Error::SizeMismatch { expected: k, actual: fields.len() });
    }
    for f in &fields[1..] {
        fields[0].ensure_compatible(f)?;
    }
    let lattice = fields[0].lattice();
    let mut used = vec![false; k];
    for mono in system.polynomials().iter().flatten() {
        for f in mono.factors {
            used[f.component] = true;
        }
    }
    let grid: Vec<Option<Vec<Complex64>>> = fields
        .iter()
        .zip(&used)
        .map(|(f, &u)| {
            u.then(|| {
                let mut d = f.clone();
                d.dealias();
                inverse_transform(&d)
            })
        })
        .collect();
    let mut out = Vec::with_capacity(k);
    let mut acc = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for poly in system.polynomials() {
        if poly.is_empty() {
            out.push(SpectralField::zeros(lattice));
            continue;
        }
        acc.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for mono in poly {
            let a = grid[mono.factors[0].component].as_ref().expect("factor evaluated");
            let b = grid[mono.factors[1].component].as_ref().expect("factor evaluated");
            let (ca, cb) = (mono.factors[0].conjugate, mono.factors[1].conjugate);
            for ((v, &x), &y) in acc.iter_mut().zip(a).zip(b) {
                let x = if ca { x.conj() } else { x };
                let y = if cb { y.conj() } else { y };
                *v += mono.coefficient * x * y;
            }
        }
        let mut f = forward_transform(lattice, &acc)?;
        f.dealias();
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::{FrequencyLattice, GridSpec};
    use crate::system::{Factor, Monomial};

    fn random_band_limited(lat: &FrequencyLattice, rng: &mut ChaCha8Rng) -> SpectralField {
        let coeffs = (0..lat.len())
            .map(|i| {
                if lat.is_dealiased(i) {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        SpectralField::new(lat, coeffs).unwrap()
    }

    fn coupled() -> MassSystem {
        MassSystem::new(
            vec![1.0, 1.3],
            vec![
                vec![
                    Monomial::new(Complex64::new(1.0, 0.5), Factor::plain(0), Factor::conj(1)),
                    Monomial::new(Complex64::new(-2.0, 0.0), Factor::plain(1), Factor::plain(1)),
                ],
                vec![Monomial::new(Complex64::new(0.0, 1.0), Factor::conj(0), Factor::conj(0))],
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_in_zero_out() {
        let lat = FrequencyLattice::new(GridSpec::new(2, 5.0, 16).unwrap()).unwrap();
        let z = vec![SpectralField::zeros(&lat), SpectralField::zeros(&lat)];
        for f in evaluate_nonlinearity(&coupled(), &z).unwrap() {
            assert_eq!(f.l2_norm(), 0.0);
        }
    }

    #[test]
    fn square_of_single_mode() {
        let lat = FrequencyLattice::new(GridSpec::new(1, 2.0 * PI, 32).unwrap()).unwrap();
        let sys = MassSystem::scalar_square(1.0, 1.0).unwrap();
        let c = Complex64::new(0.3, -0.7);
        for (k, kept) in [(4i64, true), (6, false)] {
            let mut u = SpectralField::zeros(&lat);
            u.coefficients_mut()[lat.index_of(&[k]).unwrap()] = c;
            let n = evaluate_nonlinearity(&sys, &[u]).unwrap().remove(0);
            let j = lat.index_of(&[2 * k]).unwrap();
            let expect = if kept { c * c } else { Complex64::new(0.0, 0.0) };
            assert!((n.coefficients()[j] - expect).norm() < 1e-15);
            let rest: f64 = n.coefficients().iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v.norm()).sum();
            assert!(rest < 1e-14);
        }
    }

    #[test]
    fn bilinear_cross_terms() {
        let lat = FrequencyLattice::new(GridSpec::new(2, 6.0, 16).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sys = coupled();
        let u: Vec<_> = (0..2).map(|_| random_band_limited(&lat, &mut rng)).collect();
        let v: Vec<_> = (0..2).map(|_| random_band_limited(&lat, &mut rng)).collect();
        let w: Vec<_> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let nu = evaluate_nonlinearity(&sys, &u).unwrap();
        let nv = evaluate_nonlinearity(&sys, &v).unwrap();
        let nw = evaluate_nonlinearity(&sys, &w).unwrap();
        // Cross terms from the symmetric bilinear form of each monomial.
        let grid = |f: &SpectralField| inverse_transform(f);
        let (gu, gv): (Vec<_>, Vec<_>) = (u.iter().map(grid).collect(), v.iter().map(grid).collect());
        for (i, poly) in sys.polynomials().iter().enumerate() {
            let mut acc = vec![Complex64::new(0.0, 0.0); lat.len()];
            for mono in poly {
                let pick = |g: &Vec<Vec<Complex64>>, f: Factor, x: usize| {
                    let v = g[f.component][x];
                    if f.conjugate { v.conj() } else { v }
                };
                for (x, a) in acc.iter_mut().enumerate() {
                    let [fa, fb] = mono.factors;
                    *a += mono.coefficient * (pick(&gu, fa, x) * pick(&gv, fb, x) + pick(&gv, fa, x) * pick(&gu, fb, x));
                }
            }
            let mut cross = forward_transform(&lat, &acc).unwrap();
            cross.dealias();
            let mut lhs = &nw[i] - &nu[i];
            lhs -= &nv[i];
            assert!(lhs.max_abs_diff(&cross) < 1e-12);
        }
    }

    #[test]
    fn commutes_with_translation() {
        let lat = FrequencyLattice::new(GridSpec::new(2, 4.0, 16).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sys = coupled();
        let shift = [0.37, -1.1];
        let translate = |f: &SpectralField| {
            let mut g = f.clone();
            for (i, c) in g.coefficients_mut().iter_mut().enumerate() {
                let xi = lat.frequency(i);
                *c *= Complex64::from_polar(1.0, -(xi[0] * shift[0] + xi[1] * shift[1]));
            }
            g
        };
        let u: Vec<_> = (0..2).map(|_| random_band_limited(&lat, &mut rng)).collect();
        let tu: Vec<_> = u.iter().map(translate).collect();
        let a = evaluate_nonlinearity(&sys, &tu).unwrap();
        let b: Vec<_> = evaluate_nonlinearity(&sys, &u).unwrap().iter().map(translate).collect();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.max_abs_diff(y) < 1e-10);
        }
    }
}
