use serde::{Deserialize, Serialize};

use crate::spectral::{bracket, free_propagate, Sign, SpectralField};
use crate::system::{evaluate_nonlinearity, MassSystem};
use crate::{Complex64, Error, Result};

use super::evolve::Trajectory;
use super::pair::{initial_state, CauchyData, HalfWavePair};
use super::State;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub t_final: f64,
    /// Quadrature step; also the sampling interval of every iterate.
    pub dt: f64,
    /// Maximum number of new iterates.
    pub iterations: usize,
    pub sobolev_index: f64,
    /// Stop once the distance falls below `tolerance × sup-norm`.
    pub tolerance: f64,
}

impl PicardOptions {
    pub fn new(t_final: f64, dt: f64, iterations: usize) -> Self {
        PicardOptions { t_final, dt, iterations, sobolev_index: 0.5, tolerance: 1e-13 }
    }
}

#[derive(Clone, Debug)]
pub struct PicardReport {
    /// Iterate 0 is the free evolution.
    pub iterates: Vec<Trajectory>,
    /// `sup_t ‖u_{k+1}(t) − u_k(t)‖_{H^s}` over the half-wave pairs.
    pub successive_distances: Vec<f64>,
    /// Largest ratio of consecutive distances above the round-off floor;
    /// zero when fewer than two such distances exist.
    pub contraction_factor: f64,
    pub converged: bool,
    /// Set when the distances grew three times in a row.
    pub diverged: bool,
}

impl PicardReport {
    pub fn last(&self) -> &Trajectory {
        self.iterates.last().expect("at least the free iterate")
    }
}

fn rotate_state(u0: &[HalfWavePair], t: f64) -> State {
    u0.iter()
        .map(|p| HalfWavePair {
            plus: free_propagate(&p.plus, t, p.mass, Sign::Plus),
            minus: free_propagate(&p.minus, t, p.mass, Sign::Minus),
            mass: p.mass,
        })
        .collect()
}

fn sup_distance(a: &Trajectory, b: &Trajectory, s: f64) -> f64 {
    a.states()
        .iter()
        .zip(b.states())
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.pair_distance(q, s).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn sup_pair_norm(a: &Trajectory, s: f64) -> f64 {
    a.states()
        .iter()
        .map(|x| x.iter().map(|p| p.pair_norm(s).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Applies the Duhamel map once, with the time integral evaluated by the
/// cumulative trapezoid rule on the rotated integrand `e^{∓is⟨D⟩}F/(2⟨D⟩)`.
fn duhamel_map(u0: &[HalfWavePair], current: &Trajectory, system: &MassSystem) -> Result<Trajectory> {
    let times = current.times();
    let dt = current.step_size();
    let k = u0.len();
    let lattice = u0[0].plus.lattice().clone();
    let zero = SpectralField::zeros(&lattice);
    let mut acc_plus = vec![zero.clone(); k];
    let mut acc_minus = vec![zero; k];
    let mut prev: Option<(Vec<SpectralField>, Vec<SpectralField>)> = None;
    let mut states = Vec::with_capacity(times.len());
    for (&t, st) in times.iter().zip(current.states()) {
        let positions: Vec<SpectralField> = st.iter().map(|p| p.position()).collect();
        let forcing = evaluate_nonlinearity(system, &positions)?;
        let mut rp = Vec::with_capacity(k);
        let mut rm = Vec::with_capacity(k);
        for (f, p) in forcing.iter().zip(u0) {
            let m = p.mass;
            let b = f.map_radial(|r2| Complex64::new(0.5 / bracket(r2, m), 0.0));
            rp.push(free_propagate(&b, t, m, Sign::Minus));
            rm.push(free_propagate(&b, t, m, Sign::Plus));
        }
        if let Some((pp, pm)) = &prev {
            let w = Complex64::new(0.5 * dt, 0.0);
            for i in 0..k {
                acc_plus[i].axpy(w, &pp[i]);
                acc_plus[i].axpy(w, &rp[i]);
                acc_minus[i].axpy(w, &pm[i]);
                acc_minus[i].axpy(w, &rm[i]);
            }
        }
        let state: State = u0
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut plus = p.plus.clone();
                plus.axpy(Complex64::new(0.0, -1.0), &acc_plus[i]);
                let mut minus = p.minus.clone();
                minus.axpy(Complex64::new(0.0, 1.0), &acc_minus[i]);
                HalfWavePair {
                    plus: free_propagate(&plus, t, p.mass, Sign::Plus),
                    minus: free_propagate(&minus, t, p.mass, Sign::Minus),
                    mass: p.mass,
                }
            })
            .collect();
        states.push(state);
        prev = Some((rp, rm));
    }
    Trajectory::new(times.to_vec(), states, dt)
}

/// Picard iteration of `u^±(t) = e^{±it⟨D⟩}u₀^± ∓ i ∫₀ᵗ e^{±i(t−s)⟨D⟩} F(s)/(2⟨D⟩) ds`
/// on the grid `t_j = j·dt`, starting from the free evolution.
pub fn picard_iterate(data: &CauchyData, system: &MassSystem, opts: &PicardOptions) -> Result<PicardReport> {
    if opts.iterations < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 iterations, got {}", opts.iterations)));
    }
    let steps = super::EvolveOptions::new(opts.t_final, opts.dt).steps()?;
    if data.components() != system.components() {
        return Err(Error::SizeMismatch { expected: system.components(), actual: data.components() });
    }
    let s = opts.sobolev_index;
    let u0 = initial_state(data, system.masses())?;
    let times: Vec<f64> = (0..=steps).map(|j| j as f64 * opts.dt).collect();
    let free: Vec<State> = times.iter().map(|&t| rotate_state(&u0, t)).collect();
    let mut iterates = vec![Trajectory::new(times, free, opts.dt)?];
    let mut distances: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut rises = 0;
    let mut contraction: f64 = 0.0;
    for _ in 0..opts.iterations {
        let next = duhamel_map(&u0, iterates.last().unwrap(), system)?;
        let d = sup_distance(&next, iterates.last().unwrap(), s);
        let floor = opts.tolerance * sup_pair_norm(&next, s).max(f64::MIN_POSITIVE);
        iterates.push(next);
        if !d.is_finite() {
            diverged = true;
            distances.push(d);
            break;
        }
        if let Some(&prev) = distances.last() {
            if d > floor && prev > 0.0 {
                contraction = contraction.max(d / prev);
            }
            rises = if d > prev { rises + 1 } else { 0 };
        }
        distances.push(d);
        if d <= floor {
            converged = true;
            break;
        }
        if rises >= 3 {
            diverged = true;
            break;
        }
    }
    Ok(PicardReport { iterates, successive_distances: distances, contraction_factor: contraction, converged, diverged })
}
