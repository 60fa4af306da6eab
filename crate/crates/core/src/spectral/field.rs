use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

use super::lattice::FrequencyLattice;
use crate::{Complex64, Error, Result};

/// A field on the periodic box, stored by its Fourier coefficients.
#[derive(Clone, Debug)]
pub struct SpectralField {
    lattice: FrequencyLattice,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(lattice: &FrequencyLattice) -> Self {
        SpectralField { lattice: lattice.clone(), coeffs: vec![Complex64::new(0.0, 0.0); lattice.len()] }
    }

    pub fn new(lattice: &FrequencyLattice, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::SizeMismatch { expected: lattice.len(), actual: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        Ok(SpectralField { lattice: lattice.clone(), coeffs })
    }

    /// Builds coefficients from a function of the frequency vector `ξ`.
    pub fn from_frequency_fn(lattice: &FrequencyLattice, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let coeffs = (0..lattice.len()).map(|i| f(lattice.frequency(i))).collect();
        SpectralField { lattice: lattice.clone(), coeffs }
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn ensure_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.lattice == other.lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// `‖u‖²_{L²}` over the box, `L^n Σ|c_k|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.lattice.spec().volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫ u · conj(v)` over the box.
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        let s: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        s * self.lattice.spec().volume()
    }

    /// Multiplies each coefficient by `m(|ξ|²)`.
    pub fn map_radial(&self, mut m: impl FnMut(f64) -> Complex64) -> SpectralField {
        let norms = self.lattice.norms2();
        let coeffs = self.coeffs.iter().zip(norms).map(|(c, &r2)| c * m(r2)).collect();
        SpectralField { lattice: self.lattice.clone(), coeffs }
    }

    /// In-place `self *= m(|ξ|²)`.
    pub fn apply_radial(&mut self, mut m: impl FnMut(f64) -> Complex64) {
        let norms = self.lattice.norms2();
        for (c, &r2) in self.coeffs.iter_mut().zip(norms) {
            *c *= m(r2);
        }
    }

    /// In-place `self += a · other`.
    pub fn axpy(&mut self, a: Complex64, other: &SpectralField) {
        debug_assert!(self.lattice == other.lattice);
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }

    pub fn scaled(&self, a: Complex64) -> SpectralField {
        SpectralField { lattice: self.lattice.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// Coefficients of the complex conjugate field: `c'_k = conj(c_{-k})`.
    pub fn conjugate(&self) -> SpectralField {
        let lat = &self.lattice;
        let n = lat.spec().points as i64;
        let dim = lat.dim();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for (i, out) in coeffs.iter_mut().enumerate() {
            let k = lat.mode(i);
            let mut flat = 0usize;
            for &ki in &k[..dim] {
                flat = flat * n as usize + (-ki).rem_euclid(n) as usize;
            }
            *out = self.coeffs[flat].conj();
        }
        SpectralField { lattice: lat.clone(), coeffs }
    }

    /// Zeroes every mode outside the two-thirds band.
    pub fn dealias(&mut self) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !self.lattice.is_dealiased(i) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn is_band_limited(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| self.lattice.is_dealiased(i) || *c == Complex64::new(0.0, 0.0))
    }

    /// Pointwise product computed on the grid, with dealiasing of both
    /// inputs and of the result.
    pub fn dealiased_product(&self, other: &SpectralField) -> Result<SpectralField> {
        self.ensure_compatible(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        a.dealias();
        b.dealias();
        let mut pa = inverse_transform(&a);
        let pb = inverse_transform(&b);
        for (x, y) in pa.iter_mut().zip(&pb) {
            *x *= y;
        }
        let mut out = forward_transform(&self.lattice, &pa)?;
        out.dealias();
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert!(self.lattice == rhs.lattice, "lattice mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        SpectralField { lattice: self.lattice.clone(), coeffs }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert!(self.lattice == rhs.lattice, "lattice mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        SpectralField { lattice: self.lattice.clone(), coeffs }
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert!(self.lattice == rhs.lattice, "lattice mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        assert!(self.lattice == rhs.lattice, "lattice mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<Complex64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: Complex64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(Complex64::new(rhs, 0.0))
    }
}

/// Grid values to Fourier coefficients, `c_k = N^{-n} Σ_x u(x) e^{-iξ_k·x}`.
pub fn forward_transform(lattice: &FrequencyLattice, values: &[Complex64]) -> Result<SpectralField> {
    if values.len() != lattice.len() {
        return Err(Error::SizeMismatch { expected: lattice.len(), actual: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("grid values"));
    }
    let mut data = values.to_vec();
    lattice.fft_in_place(&mut data, false);
    let scale = 1.0 / lattice.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    Ok(SpectralField { lattice: lattice.clone(), coeffs: data })
}

/// Real grid values to Fourier coefficients.
pub fn forward_real(lattice: &FrequencyLattice, values: &[f64]) -> Result<SpectralField> {
    let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_transform(lattice, &data)
}

/// Fourier coefficients to grid values.
pub fn inverse_transform(field: &SpectralField) -> Vec<Complex64> {
    let mut data = field.coeffs.clone();
    field.lattice.fft_in_place(&mut data, true);
    data
}
