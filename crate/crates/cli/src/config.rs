use std::path::{Path, PathBuf};

use kglab::harness::{BilinearMode, StrichartzFamily};
use kglab::spectral::Sign;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Run configuration shared by all subcommands; each command reads the
/// keys it needs. Sweep ranges live in the `[sweep]` table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Optional guard: when present it must name the subcommand being run.
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,

    pub dim: usize,
    pub box_length: f64,
    pub points: usize,

    /// TOML system file, relative to the config file. Without it the scalar
    /// equation `(□ + m²)u = c u²` with `mass` and `coefficient` is used.
    pub system: Option<PathBuf>,
    pub mass: f64,
    pub coefficient: f64,

    /// Gaussian initial position (zero velocity) of this width, scaled to
    /// `‖u₀‖_{H^s} = amplitude` in every component.
    pub width: f64,
    pub amplitude: f64,

    pub t_final: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub sobolev_index: f64,
    pub blowup_factor: f64,
    pub store_trajectory: bool,

    pub iterations: usize,
    pub tolerance: f64,

    /// Stored trajectory read by `variation`, relative to the config file.
    pub trajectory: Option<PathBuf>,
    pub p: f64,

    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: None,
            out: None,
            dim: 2,
            box_length: 40.0,
            points: 64,
            system: None,
            mass: 1.0,
            coefficient: 1.0,
            width: 2.0,
            amplitude: 1e-3,
            t_final: 10.0,
            dt: 0.05,
            sample_every: 10,
            sobolev_index: 0.5,
            blowup_factor: 1e6,
            store_trajectory: false,
            iterations: 10,
            tolerance: 1e-13,
            trajectory: None,
            p: 2.0,
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub dims: Vec<usize>,

    pub max_frequency: f64,
    pub radial_points: usize,
    pub angles: usize,
    pub random_samples: usize,
    pub floor: f64,
    pub triples: Vec<[f64; 3]>,

    pub tubes: Vec<f64>,
    pub deltas: Vec<f64>,
    pub radii: Vec<f64>,
    /// `|ξ₀| / r` for each shell case.
    pub center_factors: Vec<f64>,
    pub samples: u64,

    pub mode: BilinearMode,
    /// Coarse mode: `L = M` with `N = O = 8M`. Sharp mode: `H = M = N`.
    pub scales: Vec<u64>,
    /// Output band in sharp mode.
    pub output_band: u64,
    /// Empty means the mode's default signs.
    pub signs: Vec<Sign>,
    /// Optional overrides of the library defaults for bilinear and
    /// trilinear cases; `resolution` sets the frequency grid of both.
    pub trials: Option<usize>,
    pub zeta_samples: Option<usize>,
    pub resolution: Option<usize>,

    pub high: u64,
    pub lows: Vec<u64>,
    pub random_phases: bool,

    pub family: StrichartzFamily,
    /// `[q, r]` pairs as strings, e.g. `["8/3", "4"]` or `["inf", "2"]`.
    pub exponents: Vec<[String; 2]>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dims: vec![3],
            max_frequency: 1024.0,
            radial_points: 48,
            angles: 25,
            random_samples: 20_000,
            floor: 0.1,
            triples: vec![[1.0, 1.0, 1.0], [1.0, 1.2, 1.9], [1.0, 1.0, 2.0], [1.0, 1.0, 2.5]],
            tubes: vec![4.0, 8.0, 16.0],
            deltas: vec![0.05, 0.1],
            radii: vec![32.0, 64.0],
            center_factors: vec![1.5, 2.0],
            samples: 10_000_000,
            mode: BilinearMode::Coarse,
            scales: vec![2, 4, 8, 16, 32, 64],
            output_band: 4,
            signs: vec![],
            trials: None,
            zeta_samples: None,
            resolution: None,
            high: 8,
            lows: vec![1, 2, 4, 8],
            random_phases: true,
            family: StrichartzFamily::Kg,
            exponents: vec![["4".into(), "4".into()]],
        }
    }
}

/// Parsed configuration plus the directory relative paths resolve against.
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

pub fn load(path: Option<&Path>, command: &str) -> Result<Loaded, CliError> {
    let Some(path) = path else {
        return Ok(Loaded { config: RunConfig::default(), base: PathBuf::from(".") });
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(c) = &config.command {
        if c != command {
            return Err(CliError::Config(format!("config is for `{c}`, not `{command}`")));
        }
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let loaded = Loaded { config, base };
    for p in [&loaded.config.system, &loaded.config.trajectory].into_iter().flatten() {
        let full = loaded.resolve(p);
        if !full.is_file() {
            return Err(CliError::Config(format!("referenced file {} does not exist", full.display())));
        }
    }
    Ok(loaded)
}
