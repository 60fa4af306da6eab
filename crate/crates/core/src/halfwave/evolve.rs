use serde::{Deserialize, Serialize};

use crate::spectral::{free_propagate, sobolev_norm, Sign};
use crate::system::MassSystem;
use crate::variation::HalfWaveSeries;
use crate::{Error, Result};

use super::pair::{initial_state, system_energy, CauchyData, HalfWavePair};
use super::stepper::LawsonStepper;
use super::State;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Record every `sample_every`-th step.
    pub sample_every: usize,
    /// Sobolev index of the reported norms.
    pub sobolev_index: f64,
    /// Abort when the total `H^s` norm exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl EvolveOptions {
    pub fn new(t_final: f64, dt: f64) -> Self {
        EvolveOptions { t_final, dt, sample_every: 1, sobolev_index: 0.5, blowup_factor: 1e6 }
    }

    pub fn sample_every(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    pub fn sobolev_index(mut self, s: f64) -> Self {
        self.sobolev_index = s;
        self
    }

    /// Number of steps; `t_final` must be a whole number of steps.
    pub(crate) fn steps(&self) -> Result<usize> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("final time {}", self.t_final)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {}", self.dt)));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidArgument("sample_every must be positive".into()));
        }
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() > 1e-9 * self.t_final || n < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "final time {} is not a multiple of dt = {}",
                self.t_final, self.dt
            )));
        }
        let n = n as usize;
        if n % self.sample_every != 0 {
            return Err(Error::InvalidArgument(format!("{n} steps not divisible by sample stride {}", self.sample_every)));
        }
        Ok(n)
    }
}

/// Time-sampled half-wave states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<State>,
    step_size: f64,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<State>, step_size: f64) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::SizeMismatch { expected: times.len(), actual: states.len() });
        }
        if times.len() >= 2 {
            crate::spectral::uniform_step(&times)?;
        }
        Ok(Trajectory { times, states, step_size })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn components(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    pub fn final_state(&self) -> &State {
        self.states.last().expect("non-empty trajectory")
    }

    /// `u^±_i` at every sample time.
    pub fn half_wave_series(&self, component: usize, sign: Sign) -> Result<HalfWaveSeries> {
        let fields = self
            .states
            .iter()
            .map(|s| match sign {
                Sign::Plus => s[component].plus.clone(),
                Sign::Minus => s[component].minus.clone(),
            })
            .collect();
        HalfWaveSeries::new(self.times.clone(), fields, self.states[0][component].mass)
    }

    /// `‖u_i(t_j)‖_{H^s}` for every sample.
    pub fn norm_series(&self, component: usize, s: f64) -> Vec<f64> {
        self.states
            .iter()
            .map(|st| sobolev_norm(&st[component].position(), s, st[component].mass))
            .collect()
    }

    /// Largest `‖u(t_j)‖_{H^s}` over samples, summed in quadrature over components.
    pub fn sup_norm(&self, s: f64) -> f64 {
        self.states.iter().map(|st| total_norm(st, s)).fold(0.0, f64::max)
    }
}

fn total_norm(state: &[HalfWavePair], s: f64) -> f64 {
    state
        .iter()
        .map(|p| sobolev_norm(&p.position(), s, p.mass).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// One row of the emitted time series.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub time: f64,
    /// 1-based component index.
    pub component: usize,
    pub hs_norm: f64,
    pub energy: f64,
    pub scattering_increment: f64,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub series: Vec<SeriesRecord>,
}

/// Integrates the half-wave system with Lawson-RK4 from `t = 0` to `t_final`.
pub fn evolve(data: &CauchyData, system: &MassSystem, opts: &EvolveOptions) -> Result<Evolution> {
    let steps = opts.steps()?;
    if data.components() != system.components() {
        return Err(Error::SizeMismatch { expected: system.components(), actual: data.components() });
    }
    let mut state = initial_state(data, system.masses())?;
    let stepper = LawsonStepper::new(system, &state[0].plus, opts.dt)?;
    let s = opts.sobolev_index;
    let initial = total_norm(&state, s);
    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    for j in 0..steps {
        let t = j as f64 * opts.dt;
        state = stepper.step(&state, t)?;
        if (j + 1) % opts.sample_every == 0 {
            let t_next = (j + 1) as f64 * opts.dt;
            let norm = total_norm(&state, s);
            if !norm.is_finite() || (initial > 0.0 && norm > opts.blowup_factor * initial) {
                return Err(Error::NumericalAbort {
                    time: t_next,
                    reason: format!("H^{s} norm {norm:.3e} exceeds {:.0e} x initial {initial:.3e}", opts.blowup_factor),
                });
            }
            times.push(t_next);
            states.push(state.clone());
        }
    }
    let trajectory = Trajectory::new(times, states, opts.dt)?;
    let series = series_records(&trajectory, system, s);
    Ok(Evolution { trajectory, series })
}

fn series_records(traj: &Trajectory, system: &MassSystem, s: f64) -> Vec<SeriesRecord> {
    let scattering = scattering_state(traj, s);
    let mut out = Vec::with_capacity(traj.len() * traj.components());
    for (j, (&t, st)) in traj.times.iter().zip(&traj.states).enumerate() {
        let energy = system_energy(st, system);
        for (i, p) in st.iter().enumerate() {
            out.push(SeriesRecord {
                time: t,
                component: i + 1,
                hs_norm: sobolev_norm(&p.position(), s, p.mass),
                energy,
                scattering_increment: if j == 0 { 0.0 } else { scattering.increments[i][j - 1] },
            });
        }
    }
    out
}

/// Profiles `w^±(t) = e^{∓it⟨D⟩}u^±(t)` and their successive increments.
#[derive(Clone, Debug)]
pub struct ScatteringReport {
    pub times: Vec<f64>,
    /// `w^±` at the last sample, per component.
    pub profiles: Vec<HalfWavePair>,
    /// `‖w(t_{j+1}) − w(t_j)‖_{H^s}` (pair norm), per component and interval.
    pub increments: Vec<Vec<f64>>,
}

impl ScatteringReport {
    /// Sum of the increments of one component whose interval lies in `[from, to]`.
    pub fn increment_sum(&self, component: usize, from: f64, to: f64) -> f64 {
        let eps = 1e-9 * (1.0 + to.abs());
        self.increments[component]
            .iter()
            .enumerate()
            .filter(|(j, _)| self.times[*j] >= from - eps && self.times[j + 1] <= to + eps)
            .map(|(_, v)| v)
            .sum()
    }
}

fn unrotate(p: &HalfWavePair, t: f64) -> HalfWavePair {
    HalfWavePair {
        plus: free_propagate(&p.plus, t, p.mass, Sign::Minus),
        minus: free_propagate(&p.minus, t, p.mass, Sign::Plus),
        mass: p.mass,
    }
}

pub fn scattering_state(traj: &Trajectory, s: f64) -> ScatteringReport {
    let k = traj.components();
    let mut increments = vec![Vec::with_capacity(traj.len().saturating_sub(1)); k];
    let mut prev: Option<Vec<HalfWavePair>> = None;
    for (&t, st) in traj.times.iter().zip(&traj.states) {
        let w: Vec<HalfWavePair> = st.iter().map(|p| unrotate(p, t)).collect();
        if let Some(prev) = &prev {
            for i in 0..k {
                increments[i].push(w[i].pair_distance(&prev[i], s));
            }
        }
        prev = Some(w);
    }
    ScatteringReport { times: traj.times.clone(), profiles: prev.unwrap_or_default(), increments }
}

/// Largest amplitude in `[lo, hi]` (found by bisection) for which the run
/// stays below `growth × ‖u(0)‖_{H^s}` without aborting.
pub fn stability_threshold(
    build: impl Fn(f64) -> Result<CauchyData>,
    system: &MassSystem,
    opts: &EvolveOptions,
    (mut lo, mut hi): (f64, f64),
    growth: f64,
    bisections: usize,
) -> Result<f64> {
    let stable = |amp: f64| -> Result<bool> {
        let data = build(amp)?;
        let s = opts.sobolev_index;
        let init = total_norm(&initial_state(&data, system.masses())?, s);
        match evolve(&data, system, opts) {
            Ok(run) => Ok(run.trajectory.sup_norm(s) <= growth * init),
            Err(Error::NumericalAbort { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !stable(lo)? {
        return Err(Error::InvalidArgument(format!("amplitude {lo} is already unstable")));
    }
    if stable(hi)? {
        return Ok(hi);
    }
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfwave::{gaussian_profile, linear_exact};
    use crate::spectral::{FrequencyLattice, GridSpec};

    fn data(amp: f64) -> CauchyData {
        let lat = FrequencyLattice::new(GridSpec::new(2, 32.0, 32).unwrap()).unwrap();
        let f = gaussian_profile(&lat, [16.0, 16.0, 0.0], 2.5, amp);
        CauchyData::at_rest(vec![f]).unwrap()
    }

    #[test]
    fn option_validation() {
        assert!(EvolveOptions::new(1.0, 0.3).steps().is_err());
        assert!(EvolveOptions::new(1.0, 0.25).steps().is_ok());
        assert!(EvolveOptions::new(1.0, 0.25).sample_every(3).steps().is_err());
        assert!(EvolveOptions::new(-1.0, 0.25).steps().is_err());
    }

    #[test]
    fn zero_data_gives_zero_trajectory() {
        let sys = MassSystem::scalar_square(1.0, 1.0).unwrap();
        let run = evolve(&data(0.0), &sys, &EvolveOptions::new(1.0, 0.1)).unwrap();
        assert_eq!(run.trajectory.len(), 11);
        assert_eq!(run.trajectory.sup_norm(0.5), 0.0);
    }

    #[test]
    fn free_run_matches_closed_form() {
        let sys = MassSystem::free(vec![1.0]).unwrap();
        let d = data(1.0);
        let run = evolve(&d, &sys, &EvolveOptions::new(5.0, 0.1).sample_every(10)).unwrap();
        for (t, st) in run.trajectory.times().iter().zip(run.trajectory.states()) {
            let ex = linear_exact(&d, &[1.0], *t).unwrap();
            let diff = &st[0].position() - &ex.position[0];
            assert!(sobolev_norm(&diff, 1.0, 1.0) < 1e-9);
        }
        let sc = scattering_state(&run.trajectory, 0.5);
        assert!(sc.increments[0].iter().all(|&v| v < 1e-10));
        assert_eq!(run.series.len(), 6);
        assert!(run.series.iter().all(|r| (r.energy - run.series[0].energy).abs() < 1e-12));
    }

    #[test]
    fn blowup_is_reported() {
        let sys = MassSystem::scalar_square(1.0, 1.0).unwrap();
        let mut opts = EvolveOptions::new(20.0, 0.01).sample_every(10);
        opts.blowup_factor = 10.0;
        let err = evolve(&data(8.0), &sys, &opts).unwrap_err();
        assert!(matches!(err, Error::NumericalAbort { .. }), "{err}");
    }

    #[test]
    fn increment_window_sum() {
        let rep = ScatteringReport {
            times: vec![0.0, 1.0, 2.0, 3.0],
            profiles: vec![],
            increments: vec![vec![1.0, 2.0, 4.0]],
        };
        assert_eq!(rep.increment_sum(0, 0.0, 2.0), 3.0);
        assert_eq!(rep.increment_sum(0, 1.0, 3.0), 6.0);
    }
}
