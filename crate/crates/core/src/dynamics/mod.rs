//! Nonlinear right-hand sides and time integration.

mod evolve;
mod integrator;
mod rhs;

pub use evolve::{evolve, evolve_observed, Evolution, EvolutionFailure, EvolveOptions, FaradayTrack};
pub use integrator::{step, SchemeKind, SchemeSpec, Stepper, WaveState};
pub use rhs::{
    current, faraday_sources, faraday_sources_with_sign, rhs_m, rhs_mtilde, rhs_n,
};

