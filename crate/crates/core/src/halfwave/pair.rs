use crate::spectral::{bracket, inverse_transform, sobolev_norm, SpectralField};
use crate::system::MassSystem;
use crate::{Complex64, Error, Result};

use super::State;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Position and velocity of every component at one instant.
#[derive(Clone, Debug)]
pub struct CauchyData {
    pub position: Vec<SpectralField>,
    pub velocity: Vec<SpectralField>,
}

impl CauchyData {
    pub fn new(position: Vec<SpectralField>, velocity: Vec<SpectralField>) -> Result<Self> {
        if position.is_empty() {
            return Err(Error::InvalidArgument("no components".into()));
        }
        if position.len() != velocity.len() {
            return Err(Error::SizeMismatch { expected: position.len(), actual: velocity.len() });
        }
        for f in position.iter().chain(&velocity) {
            position[0].ensure_compatible(f)?;
        }
        Ok(CauchyData { position, velocity })
    }

    /// Data at rest: `u_t(0) = 0`.
    pub fn at_rest(position: Vec<SpectralField>) -> Result<Self> {
        let velocity = position.iter().map(|f| SpectralField::zeros(f.lattice())).collect();
        CauchyData::new(position, velocity)
    }

    pub fn components(&self) -> usize {
        self.position.len()
    }
}

/// `(u⁺, u⁻)` for one component of mass `m`.
#[derive(Clone, Debug)]
pub struct HalfWavePair {
    pub plus: SpectralField,
    pub minus: SpectralField,
    pub mass: f64,
}

impl HalfWavePair {
    pub fn zeros(like: &SpectralField, mass: f64) -> Self {
        HalfWavePair { plus: SpectralField::zeros(like.lattice()), minus: SpectralField::zeros(like.lattice()), mass }
    }

    /// `u = u⁺ + u⁻`.
    pub fn position(&self) -> SpectralField {
        &self.plus + &self.minus
    }

    /// `u_t = i⟨D⟩(u⁺ − u⁻)`.
    pub fn velocity(&self) -> SpectralField {
        let m = self.mass;
        (&self.plus - &self.minus).map_radial(|r2| I * bracket(r2, m))
    }

    pub fn reconstruct(&self) -> (SpectralField, SpectralField) {
        (self.position(), self.velocity())
    }

    pub fn is_finite(&self) -> bool {
        self.plus.is_finite() && self.minus.is_finite()
    }

    /// `(‖u⁺‖²_{H^s} + ‖u⁻‖²_{H^s})^{1/2}`.
    pub fn pair_norm(&self, s: f64) -> f64 {
        sobolev_norm(&self.plus, s, self.mass).hypot(sobolev_norm(&self.minus, s, self.mass))
    }

    /// Same norm of the difference with another pair.
    pub fn pair_distance(&self, other: &HalfWavePair, s: f64) -> f64 {
        let dp = &self.plus - &other.plus;
        let dm = &self.minus - &other.minus;
        sobolev_norm(&dp, s, self.mass).hypot(sobolev_norm(&dm, s, self.mass))
    }
}

/// Applies `(⟨D⟩ ∓ i∂_t)/(2⟨D⟩)` to `(u, u_t)`.
pub fn decompose(u: &SpectralField, u_t: &SpectralField, mass: f64) -> Result<HalfWavePair> {
    u.ensure_compatible(u_t)?;
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let half = |sign: f64| {
        let coeffs = u
            .coefficients()
            .iter()
            .zip(u_t.coefficients())
            .zip(u.lattice().norms2())
            .map(|((&a, &b), &r2)| {
                let br = bracket(r2, mass);
                (a * br - I * sign * b) / (2.0 * br)
            })
            .collect();
        SpectralField::new(u.lattice(), coeffs)
    };
    Ok(HalfWavePair { plus: half(1.0)?, minus: half(-1.0)?, mass })
}

/// `u^±(0) = ½(f ∓ i g/⟨D⟩)` for one component.
pub fn initial_pair(f: &SpectralField, g: &SpectralField, mass: f64) -> Result<HalfWavePair> {
    f.ensure_compatible(g)?;
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let g_over = g.map_radial(|r2| Complex64::new(1.0 / bracket(r2, mass), 0.0));
    let mut plus = f.clone();
    plus.axpy(-I, &g_over);
    let mut minus = f.clone();
    minus.axpy(I, &g_over);
    Ok(HalfWavePair { plus: plus.scaled(Complex64::new(0.5, 0.0)), minus: minus.scaled(Complex64::new(0.5, 0.0)), mass })
}

/// Half-wave state of all components.
pub fn initial_state(data: &CauchyData, masses: &[f64]) -> Result<State> {
    if masses.len() != data.components() {
        return Err(Error::SizeMismatch { expected: data.components(), actual: masses.len() });
    }
    data.position
        .iter()
        .zip(&data.velocity)
        .zip(masses)
        .map(|((f, g), &m)| initial_pair(f, g, m))
        .collect()
}

/// Closed-form solution of `(□ + m²)u = 0` at time `t`.
pub fn linear_exact(data: &CauchyData, masses: &[f64], t: f64) -> Result<CauchyData> {
    if masses.len() != data.components() {
        return Err(Error::SizeMismatch { expected: data.components(), actual: masses.len() });
    }
    let mut position = Vec::with_capacity(masses.len());
    let mut velocity = Vec::with_capacity(masses.len());
    for ((f, g), &m) in data.position.iter().zip(&data.velocity).zip(masses) {
        if !(m > 0.0) {
            return Err(Error::NonPositiveMass(m));
        }
        let lat = f.lattice();
        let mut u = Vec::with_capacity(lat.len());
        let mut ut = Vec::with_capacity(lat.len());
        for ((&a, &b), &r2) in f.coefficients().iter().zip(g.coefficients()).zip(lat.norms2()) {
            let w = bracket(r2, m);
            let (s, c) = (t * w).sin_cos();
            u.push(a * c + b * (s / w));
            ut.push(-a * (w * s) + b * c);
        }
        position.push(SpectralField::new(lat, u)?);
        velocity.push(SpectralField::new(lat, ut)?);
    }
    CauchyData::new(position, velocity)
}

/// `Σ_i ½‖∂_t u_i‖² + ½‖⟨D⟩u_i‖²`.
pub fn linear_energy(data: &CauchyData, masses: &[f64]) -> f64 {
    data.position
        .iter()
        .zip(&data.velocity)
        .zip(masses)
        .map(|((f, g), &m)| 0.5 * g.l2_norm_sq() + 0.5 * sobolev_norm(f, 1.0, m).powi(2))
        .sum()
}

/// Sum of the polynomial coefficients when the system is the scalar
/// equation `(□ + m²)u = c u²` with real `c`.
fn scalar_square_coefficient(system: &MassSystem) -> Option<f64> {
    if system.components() != 1 || !system.preserves_reality() {
        return None;
    }
    Some(system.polynomials()[0].iter().map(|m| m.coefficient.re).sum())
}

/// Energy of a half-wave state.
///
/// For the scalar equation `(□ + m²)u = c u²` this is the conserved
/// functional `½‖u_t‖² + ½‖∇u‖² + ½m²‖u‖² − (c/3)∫u³`; for other systems
/// only the quadratic part is returned.
pub fn system_energy(state: &[HalfWavePair], system: &MassSystem) -> f64 {
    let mut energy = 0.0;
    for pair in state {
        let (u, ut) = pair.reconstruct();
        energy += 0.5 * ut.l2_norm_sq() + 0.5 * sobolev_norm(&u, 1.0, pair.mass).powi(2);
    }
    if let Some(c) = scalar_square_coefficient(system) {
        if c != 0.0 {
            // The grid sum of u³ is exact for modes inside the two-thirds band.
            let mut u = state[0].position();
            u.dealias();
            let values = inverse_transform(&u);
            let cell = u.lattice().spec().spacing().powi(u.lattice().dim() as i32);
            let cube: f64 = values.iter().map(|v| (v * v * v).re).sum::<f64>() * cell;
            energy -= c * cube / 3.0;
        }
    }
    energy
}
