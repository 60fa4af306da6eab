//! p-variation of sampled paths and the V²-type norms built on it.

mod norms;
mod pvar;

pub use norms::{check_mod_projection_bound, v2_pm_norm, xs_proxy_norm, HalfWaveSeries, ModProjectionReport};
pub use pvar::{p_variation, Partition, PathValue, SampledPath, Variation};
