use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticRecord, Series};
use crate::error::{MkgError, Result};
use crate::fields::{faraday_from_potential, Faraday, MkgState, SobolevExponents};
use crate::initdata::InitialData;
use crate::multiplier::derivative;

use super::integrator::{regrid, retag, MkgSystem, SchemeSpec, Stepper};
use super::rhs::current;

/// How the Faraday tensor is integrated alongside the potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaradayTrack {
    /// Driven by the wave sources of `F_{μν}`.
    #[default]
    Coevolve,
    /// As `Coevolve` with the sign of `Im Q_{0k}` reversed.
    SignFlipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Record diagnostics every `cadence` steps; the first and last step are always recorded.
    pub cadence: usize,
    pub exponents: SobolevExponents,
    pub faraday: FaradayTrack,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            cadence: 1,
            exponents: SobolevExponents::default(),
            faraday: FaradayTrack::Coevolve,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: Series,
    pub final_state: MkgState,
    pub final_faraday: Faraday,
    pub steps: usize,
    /// Step actually taken: `T / steps`.
    pub dt: f64,
}

/// A run that stopped early, with everything recorded up to the failure.
#[derive(Debug)]
pub struct EvolutionFailure {
    pub error: MkgError,
    pub series: Series,
    pub last_state: Option<MkgState>,
}

impl std::fmt::Display for EvolutionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({} records kept)", self.error, self.series.len())
    }
}

impl std::error::Error for EvolutionFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<MkgError> for EvolutionFailure {
    fn from(error: MkgError) -> Self {
        Self {
            error,
            series: Series::default(),
            last_state: None,
        }
    }
}

/// `∂ₜF` at `t = 0` from Maxwell's equations and the Bianchi identity:
/// `∂ₜF_{0k} = j_k - ∂_l F_{kl}`, `∂ₜF_{jk} = ∂_j F_{0k} - ∂_k F_{0j}`.
fn faraday_velocity(state: &MkgState, f: &Faraday) -> Faraday {
    let n = state.dim();
    let j = current(state);
    let mut out = Faraday::zeros(*state.grid());
    for k in 1..=n {
        let mut v = j[k].clone();
        for l in 1..=n {
            if l != k {
                v -= &derivative(&f.component(k, l), l - 1);
            }
        }
        out.set(0, k, v);
    }
    for a in 1..=n {
        for b in a + 1..=n {
            out.set(
                a,
                b,
                derivative(f.get(0, b), a - 1) - derivative(f.get(0, a), b - 1),
            );
        }
    }
    out
}

fn retag_faraday(f: &Faraday, grid: crate::grid::TorusGrid) -> Faraday {
    let mut out = Faraday::zeros(grid);
    for (o, c) in out.components_mut().iter_mut().zip(f.components()) {
        *o = retag(c, grid);
    }
    out
}

/// Integrates the data to time `t_final` and records diagnostics.
pub fn evolve(
    data: &InitialData,
    t_final: f64,
    scheme: &SchemeSpec,
    opts: &EvolveOptions,
) -> Result<Evolution, EvolutionFailure> {
    evolve_observed(data, t_final, scheme, opts, &mut |_, _, _| Ok(()))
}

/// As [`evolve`], calling `observer(step, state, faraday)` after every step
/// (and once with step 0 before the first).
///
/// `dt` is shortened if needed so that an integer number of steps lands on `t_final`.
pub fn evolve_observed(
    data: &InitialData,
    t_final: f64,
    scheme: &SchemeSpec,
    opts: &EvolveOptions,
    observer: &mut dyn FnMut(usize, &MkgState, &Faraday) -> Result<()>,
) -> Result<Evolution, EvolutionFailure> {
    scheme.validate()?;
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(MkgError::InvalidScheme(format!("final time must be positive, got {t_final}")).into());
    }
    let cadence = opts.cadence.max(1);
    let original_grid = *data.grid();
    let grid = scheme.product_grid(&original_grid);
    let state0 = regrid(&data.state(), grid);
    state0.validate()?;

    let steps = ((t_final / scheme.dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let stepper = Stepper::new(&grid, scheme.kind, dt)?;
    let system = MkgSystem {
        dim: grid.dim(),
        mass: state0.mass,
        neutralize: scheme.neutralize,
        faraday: Some(match opts.faraday {
            FaradayTrack::Coevolve => 1.0,
            FaradayTrack::SignFlipped => -1.0,
        }),
    };
    let f0 = faraday_from_potential(&state0);
    let f0_t = faraday_velocity(&state0, &f0);
    let mut u = system.to_wave(&state0, Some((&f0, &f0_t)));

    let output = |s: &MkgState, f: &Faraday| {
        if grid == original_grid {
            (s.clone(), f.clone())
        } else {
            (regrid(s, original_grid), retag_faraday(f, original_grid))
        }
    };

    let mut series = Series::default();
    let mut prev = state0.clone();
    series.push(DiagnosticRecord::measure(&state0, None, &f0, &opts.exponents));
    {
        let (s, f) = output(&state0, &f0);
        observer(0, &s, &f)?;
    }
    for k in 1..=steps {
        let next = match stepper.step(&u, |v| system.forcing(v)) {
            Ok(next) => next,
            Err(error) => {
                let t = prev.t + dt;
                series.push(DiagnosticRecord::blow_up(t, error.to_string()));
                return Err(EvolutionFailure {
                    error,
                    series,
                    last_state: Some(output(&prev, &f0).0),
                });
            }
        };
        u = next;
        // land exactly on the grid of output times
        u.t = k as f64 * dt;
        let state = system.state(&u);
        let (faraday, _) = system.faraday(&u).expect("faraday is tracked");
        if k % cadence == 0 || k == steps {
            series.push(DiagnosticRecord::measure(&state, Some(&prev), &faraday, &opts.exponents));
        }
        let (s, f) = output(&state, &faraday);
        if let Err(error) = observer(k, &s, &f) {
            return Err(EvolutionFailure {
                error,
                series,
                last_state: Some(s),
            });
        }
        prev = state;
    }
    let final_state = system.state(&u);
    let (final_faraday, _) = system.faraday(&u).expect("faraday is tracked");
    let (final_state, final_faraday) = output(&final_state, &final_faraday);
    Ok(Evolution {
        series,
        final_state,
        final_faraday,
        steps,
        dt,
    })
}
