//! Time stepping for systems of forced wave equations `∂ₜ²f = Δf + g(f, ∂ₜf)`.
//!
//! The linear part is propagated exactly per Fourier mode:
//!
//! ```text
//! f'   =  cos(ωτ) f + sin(ωτ)/ω ∂ₜf
//! ∂ₜf' = -ω sin(ωτ) f + cos(ωτ) ∂ₜf          ω = |ξ|
//! ```
//!
//! `Gautschi` is the exponential midpoint rule: a half step with the forcing
//! frozen at `U_n`, then a full step with the forcing frozen at the midpoint.
//! A constant forcing enters the displacement through `(1 - cos ωτ)/ω²`, which
//! is the impulse `τ²/2` filtered by `sinc²(ωτ/2)`.
//! `Rk4` is the classical Runge–Kutta method in integrating-factor form.

use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result};
use crate::fields::{Faraday, MkgState};
use crate::grid::TorusGrid;
use crate::spectral::SpectralScalar;

use super::rhs::{faraday_sources_from, rhs_mtilde_from, rhs_n_from, StatePoints};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Gautschi,
    Rk4,
}

impl SchemeKind {
    pub fn order(self) -> u32 {
        match self {
            SchemeKind::Gautschi => 2,
            SchemeKind::Rk4 => 4,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub dt: f64,
    /// Truncate `|ξ_i| > N/3` around every product. When off, products keep
    /// all representable modes.
    #[serde(default = "yes")]
    pub dealias: bool,
    /// Evolve `A_0` against the mean-free charge density. A nonzero total
    /// charge otherwise drives the zero mode of `A_0` quadratically in time.
    #[serde(default = "yes")]
    pub neutralize: bool,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, dt: f64) -> Self {
        Self {
            kind,
            dt,
            dealias: true,
            neutralize: true,
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt, ..self }
    }

    /// `dt > 0` and finite.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(MkgError::InvalidScheme(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        Ok(())
    }

    /// Grid on which this scheme forms products.
    pub fn product_grid(&self, grid: &TorusGrid) -> TorusGrid {
        if self.dealias {
            *grid
        } else {
            TorusGrid::with_dealias(grid.dim(), grid.size(), 0.5).expect("valid grid")
        }
    }
}

/// Displacements and velocities of a system of wave equations.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub t: f64,
    pub f: Vec<SpectralScalar>,
    pub f_t: Vec<SpectralScalar>,
}

impl WaveState {
    pub fn is_finite(&self) -> bool {
        self.f.iter().chain(&self.f_t).all(|c| c.is_finite())
    }

    pub fn norm_l2(&self) -> f64 {
        self.f
            .iter()
            .chain(&self.f_t)
            .map(|c| c.norm_l2().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Per-mode propagator tables for one time increment.
struct Propagator {
    cos: Vec<f64>,
    /// `sin(ωτ)/ω`, `τ` at `ω = 0`
    sinc: Vec<f64>,
    /// `ω sin(ωτ)`
    wsin: Vec<f64>,
    /// `(1 - cos ωτ)/ω²`, `τ²/2` at `ω = 0`
    filt: Vec<f64>,
}

impl Propagator {
    fn new(grid: &TorusGrid, tau: f64) -> Self {
        let len = grid.len();
        let mut p = Self {
            cos: Vec::with_capacity(len),
            sinc: Vec::with_capacity(len),
            wsin: Vec::with_capacity(len),
            filt: Vec::with_capacity(len),
        };
        for (_, k) in grid.modes() {
            let w = k.norm();
            let (s, c) = (w * tau).sin_cos();
            p.cos.push(c);
            if w == 0.0 {
                p.sinc.push(tau);
                p.wsin.push(0.0);
                p.filt.push(0.5 * tau * tau);
            } else {
                let h = (0.5 * w * tau).sin() / w;
                p.sinc.push(s / w);
                p.wsin.push(w * s);
                p.filt.push(2.0 * h * h);
            }
        }
        p
    }

    /// Free flow of one component.
    fn free(&self, f: &SpectralScalar, f_t: &SpectralScalar) -> (SpectralScalar, SpectralScalar) {
        let mut out_f = f.clone();
        let mut out_t = f_t.clone();
        let (a, b) = (f.coeffs(), f_t.coeffs());
        for (i, (of, ot)) in out_f
            .coeffs_mut()
            .iter_mut()
            .zip(out_t.coeffs_mut())
            .enumerate()
        {
            *of = self.cos[i] * a[i] + self.sinc[i] * b[i];
            *ot = -self.wsin[i] * a[i] + self.cos[i] * b[i];
        }
        (out_f, out_t)
    }

    fn free_all(&self, u: &WaveState, dt: f64) -> WaveState {
        let (f, f_t) = u
            .f
            .iter()
            .zip(&u.f_t)
            .map(|(a, b)| self.free(a, b))
            .unzip();
        WaveState { t: u.t + dt, f, f_t }
    }

    /// Adds `c · E(τ)(0, g)`.
    fn kick(&self, c: f64, g: &[SpectralScalar], u: &mut WaveState) {
        for ((f, f_t), g) in u.f.iter_mut().zip(u.f_t.iter_mut()).zip(g) {
            let gc = g.coeffs();
            for (i, v) in f.coeffs_mut().iter_mut().enumerate() {
                *v += (c * self.sinc[i]) * gc[i];
            }
            for (i, v) in f_t.coeffs_mut().iter_mut().enumerate() {
                *v += (c * self.cos[i]) * gc[i];
            }
        }
    }

    /// Adds the exact response to a forcing held constant over `τ`.
    fn constant_forcing(&self, g: &[SpectralScalar], u: &mut WaveState) {
        for ((f, f_t), g) in u.f.iter_mut().zip(u.f_t.iter_mut()).zip(g) {
            let gc = g.coeffs();
            for (i, v) in f.coeffs_mut().iter_mut().enumerate() {
                *v += self.filt[i] * gc[i];
            }
            for (i, v) in f_t.coeffs_mut().iter_mut().enumerate() {
                *v += self.sinc[i] * gc[i];
            }
        }
    }
}

fn add_velocity(c: f64, g: &[SpectralScalar], u: &mut WaveState) {
    for (f_t, g) in u.f_t.iter_mut().zip(g) {
        for (v, x) in f_t.coeffs_mut().iter_mut().zip(g.coeffs()) {
            *v += c * *x;
        }
    }
}

/// Fixed-step integrator with cached propagators for `dt` and `dt/2`.
pub struct Stepper {
    kind: SchemeKind,
    dt: f64,
    half: Propagator,
    full: Propagator,
}

impl Stepper {
    /// `dt` may be negative (backward stepping) but must be finite and nonzero.
    pub fn new(grid: &TorusGrid, kind: SchemeKind, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(MkgError::InvalidScheme(format!(
                "dt must be finite and nonzero, got {dt}"
            )));
        }
        Ok(Self {
            kind,
            dt,
            half: Propagator::new(grid, 0.5 * dt),
            full: Propagator::new(grid, dt),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `u` by `dt`. `forcing` returns `g` with `∂ₜ²f = Δf + g`.
    pub fn step<G>(&self, u: &WaveState, mut forcing: G) -> Result<WaveState>
    where
        G: FnMut(&WaveState) -> Vec<SpectralScalar>,
    {
        let h = self.dt;
        let next = match self.kind {
            SchemeKind::Gautschi => {
                let g0 = forcing(u);
                let mut mid = self.half.free_all(u, 0.5 * h);
                self.half.constant_forcing(&g0, &mut mid);
                let g1 = forcing(&mid);
                let mut next = self.full.free_all(u, h);
                self.full.constant_forcing(&g1, &mut next);
                next
            }
            SchemeKind::Rk4 => {
                let e_half = self.half.free_all(u, 0.5 * h);
                let e_full = self.full.free_all(u, h);
                let k1 = forcing(u);
                let mut u2 = e_half.clone();
                self.half.kick(0.5 * h, &k1, &mut u2);
                let k2 = forcing(&u2);
                let mut u3 = e_half;
                add_velocity(0.5 * h, &k2, &mut u3);
                let k3 = forcing(&u3);
                let mut u4 = e_full.clone();
                self.half.kick(h, &k3, &mut u4);
                let k4 = forcing(&u4);
                let mut next = e_full;
                self.full.kick(h / 6.0, &k1, &mut next);
                self.half.kick(h / 3.0, &k2, &mut next);
                self.half.kick(h / 3.0, &k3, &mut next);
                add_velocity(h / 6.0, &k4, &mut next);
                next
            }
        };
        if !next.is_finite() {
            return Err(MkgError::BlowUp {
                t: next.t,
                reason: format!(
                    "non-finite field after step from t = {} (norm before step {:.6e})",
                    u.t,
                    u.norm_l2()
                ),
            });
        }
        Ok(next)
    }
}

/// The gauge-reduced MKG system laid out as `[φ, A_0..A_n, F_{μν} (μ<ν)]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MkgSystem {
    pub dim: usize,
    pub mass: f64,
    pub neutralize: bool,
    /// Sign on `Im Q_{0k}` when the Faraday tensor is co-evolved.
    pub faraday: Option<f64>,
}

impl MkgSystem {
    pub fn to_wave(&self, s: &MkgState, faraday: Option<(&Faraday, &Faraday)>) -> WaveState {
        let mut f = vec![s.phi.clone()];
        let mut f_t = vec![s.phi_t.clone()];
        f.extend(s.a.iter().cloned());
        f_t.extend(s.a_t.iter().cloned());
        if let Some((fa, fa_t)) = faraday {
            f.extend(fa.components().iter().cloned());
            f_t.extend(fa_t.components().iter().cloned());
        }
        WaveState { t: s.t, f, f_t }
    }

    pub fn state(&self, u: &WaveState) -> MkgState {
        let n = self.dim;
        MkgState {
            t: u.t,
            phi: u.f[0].clone(),
            phi_t: u.f_t[0].clone(),
            a: u.f[1..n + 2].to_vec(),
            a_t: u.f_t[1..n + 2].to_vec(),
            mass: self.mass,
        }
    }

    pub fn faraday(&self, u: &WaveState) -> Option<(Faraday, Faraday)> {
        let n = self.dim;
        if u.f.len() == n + 2 {
            return None;
        }
        let grid = *u.f[0].grid();
        let mut fa = Faraday::zeros(grid);
        let mut fa_t = Faraday::zeros(grid);
        fa.components_mut().clone_from_slice(&u.f[n + 2..]);
        fa_t.components_mut().clone_from_slice(&u.f_t[n + 2..]);
        Some((fa, fa_t))
    }

    /// `g = -(□-source)`, i.e. `∂ₜ²f = Δf - M̃`, `Δf - N`, `Δf - S`.
    pub fn forcing(&self, u: &WaveState) -> Vec<SpectralScalar> {
        let state = self.state(u);
        let pts = StatePoints::new(&state);
        let mut g = Vec::with_capacity(u.f.len());
        g.push(-rhs_mtilde_from(&pts, &state));
        let mut nn = rhs_n_from(&pts, self.dim);
        if self.neutralize {
            let m = nn[0].mean();
            nn[0].coeffs_mut()[0] -= m;
        }
        g.extend(nn.into_iter().map(|c| -c));
        if let Some(sign) = self.faraday {
            let src = faraday_sources_from(&pts, &state, sign);
            g.extend(src.components().iter().map(|c| -c));
        }
        g
    }
}

/// Advances an MKG state by one step of `scheme`, without Faraday co-evolution.
pub fn step(state: &MkgState, scheme: &SchemeSpec) -> Result<MkgState> {
    state.validate()?;
    let system = MkgSystem {
        dim: state.dim(),
        mass: state.mass,
        neutralize: scheme.neutralize,
        faraday: None,
    };
    let grid = scheme.product_grid(state.grid());
    let stepper = Stepper::new(&grid, scheme.kind, scheme.dt)?;
    let u = system.to_wave(&regrid(state, grid), None);
    let next = stepper.step(&u, |v| system.forcing(v))?;
    let mut out = system.state(&next);
    if grid != *state.grid() {
        out = regrid(&out, *state.grid());
    }
    Ok(out)
}

/// Re-tags every field with `grid` (same dimension and size).
pub(crate) fn regrid(state: &MkgState, grid: TorusGrid) -> MkgState {
    if *state.grid() == grid {
        return state.clone();
    }
    let mut out = state.clone();
    for f in out.fields_mut() {
        *f = retag(f, grid);
    }
    out
}

pub(crate) fn retag(f: &SpectralScalar, grid: TorusGrid) -> SpectralScalar {
    SpectralScalar::from_coeffs(grid, f.coeffs().to_vec(), f.is_real()).expect("same size")
}

/// `|f̂|² + |∂ₜf̂|²/|ξ|²` per nonzero mode, conserved by the free flow.
#[cfg(test)]
fn mode_energy(f: &SpectralScalar, f_t: &SpectralScalar) -> Vec<f64> {
    f.grid()
        .modes()
        .map(|(i, k)| {
            let w2 = k.norm_sqr();
            if w2 == 0.0 {
                0.0
            } else {
                f.coeffs()[i].norm_sqr() + f_t.coeffs()[i].norm_sqr() / w2
            }
        })
        .collect()
}
