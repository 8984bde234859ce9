//! Pseudospectral Maxwell–Klein–Gordon solver in Lorenz gauge on the torus,
//! with constraint-compatible data, consistency diagnostics and an empirical
//! lab for space-time `H^{s,b}` estimates.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod estlab;
pub mod fft;
pub mod fields;
pub mod grid;
pub mod initdata;
pub mod multiplier;
pub mod nullforms;
pub mod random;
pub mod snapshot;
pub mod spectral;

pub use diagnostics::{DiagnosticRecord, NormReport, Series};
pub use dynamics::{evolve, step, EvolveOptions, SchemeKind, SchemeSpec};
pub use error::{MkgError, Result, Warning};
pub use estlab::{probe, Ensemble, Estimate, ProbeConfig, ProbeReport, SpaceTimeField, Verdict, Window};
pub use fields::{Faraday, MkgState, SobolevExponents};
pub use grid::TorusGrid;
pub use initdata::{build_data, verify_constraints, BuildOptions, FaradaySeed, InitialData};
pub use multiplier::{apply_multiplier, MultiplierKind, MultiplierSymbol};
pub use spectral::{PointField, SpectralScalar};
