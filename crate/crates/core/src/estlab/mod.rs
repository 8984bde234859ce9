//! Wave-Sobolev norms `H^{s,b}` on the space-time lattice and empirical
//! probes of bilinear estimates for free waves.
//!
//! Time is periodized on `[0, 2π)` with integer `τ`. A cosine-squared taper
//! is applied by default so that wrap-around does not smear the weights
//! `⟨|τ| - |ξ|⟩^b`.

mod probe;
mod spacetime;
mod waves;

pub use probe::{
    admissibility, loglog_slope, nullform_gain_probe, probe, product_slices, sides, strichartz_exponent,
    verdict, Admissibility, Condition, Ensemble, Estimate, ProbeConfig, ProbeReport, Resolution,
    ResolutionReport, Verdict, BOUNDED_SLOPE, DEGENERATE_RHS, GROWING_SLOPE, SUMMARY_COLUMNS,
};
pub use spacetime::{tau_of, time_points, SpaceTimeField, Window};
pub use waves::{ensemble_radius, knapp, knapp_scales, random_free, single_mode, FreeWave, WaveMode, RANDOM_FREE_DECAY};
