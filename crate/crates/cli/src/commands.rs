use std::fs;

use kglab::halfwave::{
    evolve, gaussian_profile, linear_exact, picard_iterate, scale_to_norm, CauchyData, EvolveOptions, HalfWavePair,
    PicardOptions, Trajectory,
};
use kglab::harness::{
    shell_sweep, strauss_exponent, strauss_residual, strichartz_admissible, strichartz_q, verify_bilinear,
    verify_modulation_bound, verify_nonresonance_bound, verify_trilinear, BilinearCase, BilinearMode, Exponent,
    SampleSpec, ShellSpec, TrilinearCase, VerificationRecord,
};
use kglab::spectral::{Dyadic, FrequencyLattice, GridSpec, Sign, SpectralField};
use kglab::system::MassSystem;
use kglab::variation::{p_variation, v2_pm_norm, xs_proxy_norm, HalfWaveSeries, SampledPath};
use kglab::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Loaded, RunConfig};
use crate::error::CliError;
use crate::output::{sci, OutputDir};

/// Summary of a completed run; `passed` is false only for failed sweeps.
pub struct Outcome {
    pub summary: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(summary: Value) -> Self {
        Outcome { summary, passed: true }
    }
}

/// Half-wave states as written by `simulate` and read by `variation`.
#[derive(Serialize, Deserialize)]
pub struct StoredTrajectory {
    pub grid: GridSpec,
    pub masses: Vec<f64>,
    pub times: Vec<f64>,
    /// Per component, the `u⁺` and `u⁻` coefficients at every sample.
    pub plus: Vec<Vec<Vec<Complex64>>>,
    pub minus: Vec<Vec<Vec<Complex64>>>,
}

impl StoredTrajectory {
    fn from_trajectory(traj: &Trajectory, grid: GridSpec, masses: &[f64]) -> Self {
        let pick = |f: fn(&HalfWavePair) -> &SpectralField| -> Vec<Vec<Vec<Complex64>>> {
            (0..traj.components())
                .map(|i| traj.states().iter().map(|st| f(&st[i]).coefficients().to_vec()).collect())
                .collect()
        };
        StoredTrajectory {
            grid,
            masses: masses.to_vec(),
            times: traj.times().to_vec(),
            plus: pick(|p| &p.plus),
            minus: pick(|p| &p.minus),
        }
    }

    fn series(&self, lattice: &FrequencyLattice, component: usize, sign: Sign) -> Result<HalfWaveSeries, CliError> {
        let source = match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        };
        let samples = source
            .get(component)
            .ok_or_else(|| CliError::Config(format!("trajectory has no component {}", component + 1)))?;
        let fields = samples
            .iter()
            .map(|c| SpectralField::new(lattice, c.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HalfWaveSeries::new(self.times.clone(), fields, self.masses[component])?)
    }
}

fn lattice(c: &RunConfig) -> Result<FrequencyLattice, CliError> {
    Ok(FrequencyLattice::new(GridSpec::new(c.dim, c.box_length, c.points)?)?)
}

fn system(l: &Loaded) -> Result<MassSystem, CliError> {
    let c = &l.config;
    match &c.system {
        Some(p) => {
            let path = l.resolve(p);
            let text = fs::read_to_string(&path)?;
            MassSystem::from_toml_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
        None => Ok(MassSystem::scalar_square(c.mass, c.coefficient)?),
    }
}

/// Centred Gaussian at rest in every component, of size `amplitude` in `H^s`.
fn initial_data(c: &RunConfig, lat: &FrequencyLattice, sys: &MassSystem) -> Result<CauchyData, CliError> {
    let mid = c.box_length / 2.0;
    let g = gaussian_profile(lat, [mid; 3], c.width, 1.0);
    let position = sys.masses().iter().map(|&m| scale_to_norm(&g, c.sobolev_index, m, c.amplitude)).collect();
    Ok(CauchyData::at_rest(position)?)
}

pub fn simulate(l: &Loaded, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = &l.config;
    let lat = lattice(c)?;
    let sys = system(l)?;
    let data = initial_data(c, &lat, &sys)?;
    let mut opts = EvolveOptions::new(c.t_final, c.dt).sample_every(c.sample_every).sobolev_index(c.sobolev_index);
    opts.blowup_factor = c.blowup_factor;
    let run = evolve(&data, &sys, &opts)?;

    let rows: Vec<Vec<String>> = run
        .series
        .iter()
        .map(|r| {
            vec![sci(r.time), r.component.to_string(), sci(r.hs_norm), sci(r.energy), sci(r.scattering_increment)]
        })
        .collect();
    out.csv("series.csv", &["time", "component", "hs_norm", "energy", "scattering_increment"], &rows)?;
    if c.store_trajectory {
        let stored = StoredTrajectory::from_trajectory(&run.trajectory, *lat.spec(), sys.masses());
        out.json("trajectory.json", &stored)?;
    }

    let traj = &run.trajectory;
    let k = traj.components();
    let energies: Vec<f64> = run.series.iter().step_by(k).map(|r| r.energy).collect();
    let e0 = energies[0];
    let drift = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE);
    let components: Vec<Value> = (0..k)
        .map(|i| {
            let norms = traj.norm_series(i, c.sobolev_index);
            let increments: f64 = run.series.iter().filter(|r| r.component == i + 1).map(|r| r.scattering_increment).sum();
            json!({
                "component": i + 1,
                "initial_norm": norms[0],
                "final_norm": norms[norms.len() - 1],
                "max_norm": norms.iter().cloned().fold(0.0, f64::max),
                "increment_sum": increments,
            })
        })
        .collect();
    let mut summary = json!({
        "final_time": traj.times()[traj.len() - 1],
        "samples": traj.len(),
        "sup_norm": traj.sup_norm(c.sobolev_index),
        "relative_energy_drift": drift,
        "components": components,
    });
    if sys.is_free() {
        let exact = linear_exact(&data, sys.masses(), c.t_final)?;
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for (p, (u, ut)) in traj.final_state().iter().zip(exact.position.iter().zip(&exact.velocity)) {
            let (v, vt) = p.reconstruct();
            diff = diff.max(v.max_abs_diff(u)).max(vt.max_abs_diff(ut));
            scale = scale.max(u.coefficients().iter().chain(ut.coefficients()).map(|z| z.norm()).fold(0.0, f64::max));
        }
        summary["linear_match"] = json!({ "max_abs_diff": diff, "max_abs_coefficient": scale });
    }
    Ok(Outcome::ok(summary))
}

pub fn picard(l: &Loaded, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = &l.config;
    let lat = lattice(c)?;
    let sys = system(l)?;
    let data = initial_data(c, &lat, &sys)?;
    let mut opts = PicardOptions::new(c.t_final, c.dt, c.iterations);
    opts.sobolev_index = c.sobolev_index;
    opts.tolerance = c.tolerance;
    let report = picard_iterate(&data, &sys, &opts)?;
    let rows: Vec<Vec<String>> =
        report.successive_distances.iter().enumerate().map(|(k, d)| vec![(k + 1).to_string(), sci(*d)]).collect();
    out.csv("distances.csv", &["iteration", "sup_distance"], &rows)?;
    Ok(Outcome::ok(json!({
        "iterations": report.successive_distances.len(),
        "contraction_factor": report.contraction_factor,
        "converged": report.converged,
        "diverged": report.diverged,
        "last_distance": report.successive_distances.last(),
    })))
}

fn sample_spec(c: &RunConfig, seed: u64) -> SampleSpec {
    let s = &c.sweep;
    SampleSpec {
        max_frequency: s.max_frequency,
        radial_points: s.radial_points,
        angles: s.angles,
        random_samples: s.random_samples,
        seed,
        floor: s.floor,
    }
}

fn record_outcome(out: &mut OutputDir, records: Vec<VerificationRecord>, seed: u64) -> Result<Outcome, CliError> {
    let records: Vec<VerificationRecord> =
        records.into_iter().map(|r| VerificationRecord { seed: Some(seed), ..r }).collect();
    out.records("records.jsonl", &records)?;
    let passed = records.iter().all(|r| r.passed);
    let table: Vec<Value> = records
        .iter()
        .map(|r| json!({ "name": r.name, "parameters": r.parameters, "constant": r.constant, "spread": r.spread, "passed": r.passed }))
        .collect();
    Ok(Outcome { summary: json!({ "seed": seed, "passed": passed, "records": table }), passed })
}

pub fn verify_modulation(l: &Loaded, seed: u64, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = &l.config;
    let spec = sample_spec(c, seed);
    let records = c.sweep.dims.iter().map(|&n| verify_modulation_bound(c.mass, n, &spec)).collect::<Result<_, _>>()?;
    record_outcome(out, records, seed)
}

pub fn verify_nonresonance(l: &Loaded, seed: u64, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = &l.config;
    let spec = sample_spec(c, seed);
    let mut records = Vec::new();
    for &triple in &c.sweep.triples {
        for &n in &c.sweep.dims {
            records.push(verify_nonresonance_bound(triple, n, &spec)?);
        }
    }
    record_outcome(out, records, seed)
}

pub fn verify_shell(l: &Loaded, seed: u64, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let s = &l.config.sweep;
    let mut specs = Vec::new();
    for &dim in &s.dims {
        for &tube in &s.tubes {
            for &delta in &s.deltas {
                for &r in &s.radii {
                    for &k in &s.center_factors {
                        specs.push(ShellSpec { dim, r, big_r: r, delta, big_delta: delta, tube, center_distance: k * r });
                    }
                }
            }
        }
    }
    let (record, estimates) = shell_sweep(&specs, s.samples, seed)?;
    let rows: Vec<Vec<String>> = specs
        .iter()
        .zip(&estimates)
        .map(|(p, e)| {
            vec![
                p.dim.to_string(),
                sci(p.r),
                sci(p.delta),
                sci(p.tube),
                sci(p.center_distance),
                sci(e.volume),
                sci(e.standard_error),
                sci(e.bound),
                sci(e.ratio),
                e.hits.to_string(),
                e.samples.to_string(),
            ]
        })
        .collect();
    out.csv(
        "shells.csv",
        &["dim", "radius", "thickness", "tube", "center_distance", "volume", "standard_error", "bound", "ratio", "hits", "samples"],
        &rows,
    )?;
    record_outcome(out, vec![record], seed)
}

fn dyadic(v: u64) -> Result<Dyadic, CliError> {
    Ok(Dyadic::new(v)?)
}

fn signs<const K: usize>(given: &[Sign], default: [Sign; K]) -> Result<[Sign; K], CliError> {
    if given.is_empty() {
        return Ok(default);
    }
    given.try_into().map_err(|_| CliError::Config(format!("expected {K} signs, got {}", given.len())))
}

pub fn verify_bilinear_sweep(l: &Loaded, seed: u64, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let s = &l.config.sweep;
    let mut cases = Vec::new();
    for &dim in &s.dims {
        for &scale in &s.scales {
            let mut case = match s.mode {
                BilinearMode::Coarse => {
                    let sg = signs(&s.signs, [Sign::Plus, Sign::Plus])?;
                    BilinearCase::new(dim, dyadic(scale)?, dyadic(8 * scale)?, dyadic(8 * scale)?, s.mode, sg)
                }
                BilinearMode::Sharp => {
                    let sg = signs(&s.signs, [Sign::Plus, Sign::Minus])?;
                    BilinearCase::new(dim, dyadic(scale)?, dyadic(scale)?, dyadic(s.output_band)?, s.mode, sg)
                }
            };
            case.seed = seed;
            case.trials = s.trials.unwrap_or(case.trials);
            case.zeta_samples = s.zeta_samples.unwrap_or(case.zeta_samples);
            case.grid = s.resolution.unwrap_or(case.grid);
            cases.push(case);
        }
    }
    let (record, trials) = verify_bilinear(&cases)?;
    let mut rows = Vec::new();
    for (case, ts) in cases.iter().zip(&trials) {
        for (j, t) in ts.iter().enumerate() {
            rows.push(vec![
                case.dim.to_string(),
                case.m.value().to_string(),
                case.n.value().to_string(),
                case.o.value().to_string(),
                j.to_string(),
                sci(t.norm),
                sci(t.phi_norm),
                sci(t.psi_norm),
                sci(t.ratio),
                sci(t.normalized),
                sci(t.ratio_error),
            ]);
        }
    }
    out.csv(
        "trials.csv",
        &["dim", "m", "n", "o", "trial", "norm", "phi_norm", "psi_norm", "ratio", "normalized", "ratio_error"],
        &rows,
    )?;
    record_outcome(out, vec![record], seed)
}

pub fn verify_trilinear_sweep(l: &Loaded, seed: u64, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let s = &l.config.sweep;
    let sg = signs(&s.signs, [Sign::Plus; 3])?;
    let mut cases = Vec::new();
    for &dim in &s.dims {
        for &low in &s.lows {
            let mut case = TrilinearCase::new(dim, dyadic(low)?, dyadic(s.high)?, sg);
            case.mass = l.config.mass;
            case.seed = seed;
            case.random_phases = s.random_phases;
            case.trials = s.trials.unwrap_or(case.trials);
            case.grid = s.resolution.unwrap_or(case.grid);
            cases.push(case);
        }
    }
    let record = verify_trilinear(&cases)?;
    record_outcome(out, vec![record], seed)
}

pub fn strichartz(l: &Loaded, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let s = &l.config.sweep;
    let family = serde_json::to_value(s.family)?;
    let mut rows = Vec::new();
    let mut admissible = 0;
    for &n in &s.dims {
        for [q, r] in &s.exponents {
            let (q, r): (Exponent, Exponent) = (q.parse()?, r.parse()?);
            let n = u32::try_from(n).map_err(|_| CliError::Config(format!("dimension {n}")))?;
            let (ok, gap) = strichartz_admissible(n, q, r, s.family)?;
            let partner = strichartz_q(n, r, s.family)?.map(|e| e.to_string()).unwrap_or_else(|| "none".into());
            admissible += usize::from(ok);
            rows.push(vec![
                n.to_string(),
                family.as_str().unwrap_or_default().to_string(),
                q.to_string(),
                r.to_string(),
                ok.to_string(),
                gap.to_string(),
                partner,
            ]);
        }
    }
    out.csv("strichartz.csv", &["dim", "family", "q", "r", "admissible", "regularity", "admissible_q"], &rows)?;
    Ok(Outcome::ok(json!({ "pairs": rows.len(), "admissible": admissible })))
}

pub fn strauss(out: &mut OutputDir) -> Result<Outcome, CliError> {
    let table: Vec<(u32, f64)> = (1..=6).map(|n| (n, strauss_exponent(n))).collect();
    let rows: Vec<Vec<String>> =
        table.iter().map(|&(n, g)| vec![n.to_string(), sci(g), sci(strauss_residual(n, g))]).collect();
    out.csv("strauss.csv", &["n", "exponent", "residual"], &rows)?;
    let values: Vec<Value> = table.iter().map(|&(n, g)| json!({ "n": n, "exponent": g })).collect();
    Ok(Outcome::ok(json!({ "exponents": values })))
}

pub fn variation(l: &Loaded, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let c = &l.config;
    let path = c.trajectory.as_ref().ok_or_else(|| CliError::Config("variation needs `trajectory`".into()))?;
    let path = l.resolve(path);
    let stored: StoredTrajectory = serde_json::from_str(&fs::read_to_string(&path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let lat = FrequencyLattice::new(stored.grid)?;
    let mut rows = Vec::new();
    let mut norms = Vec::new();
    for i in 0..stored.masses.len() {
        for sign in Sign::BOTH {
            let series = stored.series(&lat, i, sign)?;
            let pvar = p_variation(&SampledPath::new(series.times().to_vec(), series.unrotated(sign), true)?, c.p)?.value;
            let v2 = v2_pm_norm(&series, sign);
            let xs = xs_proxy_norm(&series, sign, c.sobolev_index);
            rows.push(vec![(i + 1).to_string(), sign.symbol().to_string(), sci(c.p), sci(pvar), sci(v2), sci(xs)]);
            norms.push(json!({ "component": i + 1, "sign": sign, "p_variation": pvar, "v2": v2, "xs": xs }));
        }
    }
    out.csv("variation.csv", &["component", "sign", "p", "p_variation", "v2_norm", "xs_norm"], &rows)?;
    Ok(Outcome::ok(json!({ "trajectory": path.display().to_string(), "samples": stored.times.len(), "norms": norms })))
}
