use serde::{Deserialize, Serialize};

use crate::spectral::{
    bracket, dyadic_bands, free_propagate, lp_project, modulation_project, Dyadic, ModulationBand, Sign,
    SpaceTimeField, SpectralField, Window,
};
use crate::{Error, Result};

use super::pvar::{p_variation, SampledPath};

/// One half-wave component `u^±(t_j)` on a uniform time grid.
#[derive(Clone, Debug)]
pub struct HalfWaveSeries {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    mass: f64,
}

impl HalfWaveSeries {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>, mass: f64) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::SizeMismatch { expected: times.len(), actual: fields.len() });
        }
        if fields.is_empty() {
            return Err(Error::InvalidArgument("empty series".into()));
        }
        if times.len() >= 2 {
            crate::spectral::uniform_step(&times)?;
        }
        for f in &fields[1..] {
            fields[0].ensure_compatible(f)?;
        }
        if !(mass > 0.0) {
            return Err(Error::NonPositiveMass(mass));
        }
        Ok(HalfWaveSeries { times, fields, mass })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> HalfWaveSeries {
        HalfWaveSeries { times: self.times.clone(), fields: self.fields.iter().map(f).collect(), mass: self.mass }
    }

    /// `e^{∓it⟨D⟩}u(t)`: constant for a free `±` wave.
    pub fn unrotated(&self, sign: Sign) -> Vec<SpectralField> {
        self.times
            .iter()
            .zip(&self.fields)
            .map(|(&t, f)| free_propagate(f, t, self.mass, sign.flip()))
            .collect()
    }
}

/// `‖u‖_{V²_±}` proxy: 2-variation of `e^{∓it⟨D⟩}u` with a leading zero.
pub fn v2_pm_norm(series: &HalfWaveSeries, sign: Sign) -> f64 {
    let path = SampledPath::new(series.times.clone(), series.unrotated(sign), true).expect("validated series");
    p_variation(&path, 2.0).expect("p = 2 on a non-empty path").value
}

/// `(Σ_N max(N,1)^{2s} ‖P_N u‖²_{V²_±})^{1/2}` over the lattice's dyadic bands.
pub fn xs_proxy_norm(series: &HalfWaveSeries, sign: Sign, s: f64) -> f64 {
    let lattice = series.fields[0].lattice().clone();
    dyadic_bands(&lattice)
        .into_iter()
        .map(|n| {
            let band = series.map(|f| lp_project(f, n));
            (n.value().max(1) as f64).powf(2.0 * s) * v2_pm_norm(&band, sign).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Modulation-projection sweep `M ↦ ‖Q^±_M u‖_{L²}` against `‖u‖_{V²_±}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModProjectionReport {
    pub modulations: Vec<Dyadic>,
    /// `‖Q^±_M (w·u)‖_{L²_{t,x}}` with `w` the chosen window.
    pub projected: Vec<f64>,
    pub v2_norm: f64,
    /// `‖Q^±_M u‖ · M^{1/2} / ‖u‖_{V²_±}`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log ‖Q_M u‖` against `log M`.
    pub slope: f64,
    pub max_ratio: f64,
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Sweeps `‖Q^±_M u‖ M^{1/2} / ‖u‖_{V²_±}` over nonzero dyadic `M`.
///
/// The temporal grid must resolve every modulation in the sweep:
/// `π/dt ≥ max⟨ξ⟩ + 2·max M` over the occupied modes.
pub fn check_mod_projection_bound(
    series: &HalfWaveSeries,
    modulations: &[Dyadic],
    sign: Sign,
    window: Window,
) -> Result<ModProjectionReport> {
    if modulations.is_empty() || modulations.iter().any(|m| m.is_zero()) {
        return Err(Error::InvalidArgument("modulations must be nonzero dyadic numbers".into()));
    }
    let st = SpaceTimeField::new(series.times.clone(), series.fields.clone())?;
    let lattice = series.fields[0].lattice();
    let occupied = (0..lattice.len())
        .filter(|&k| series.fields.iter().any(|f| f.coefficients()[k].norm() > 0.0))
        .map(|k| bracket(lattice.norm2(k), series.mass))
        .fold(0.0, f64::max);
    let m_max = modulations.iter().map(|m| m.as_f64()).fold(0.0, f64::max);
    let nyquist = std::f64::consts::PI / st.dt();
    if nyquist < occupied + 2.0 * m_max {
        return Err(Error::UnderResolved(format!(
            "temporal Nyquist {nyquist:.3} below max<xi> {occupied:.3} + 2M = {:.3}",
            occupied + 2.0 * m_max
        )));
    }
    let windowed = st.windowed(window);
    let v2 = v2_pm_norm(series, sign);
    let projected: Vec<f64> = modulations
        .iter()
        .map(|&m| modulation_project(&windowed, ModulationBand::Band(m), sign, series.mass).l2_norm())
        .collect();
    let ratios: Vec<f64> = projected
        .iter()
        .zip(modulations)
        .map(|(q, m)| if v2 > 0.0 { q * m.as_f64().sqrt() / v2 } else { 0.0 })
        .collect();
    let logm: Vec<f64> = modulations.iter().map(|m| m.as_f64().ln()).collect();
    let logq: Vec<f64> = projected.iter().map(|q| q.max(f64::MIN_POSITIVE).ln()).collect();
    let slope = if modulations.len() >= 2 { fit_slope(&logm, &logq) } else { f64::NAN };
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(ModProjectionReport { modulations: modulations.to_vec(), projected, v2_norm: v2, ratios, slope, max_ratio })
}
