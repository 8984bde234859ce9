//! Constraint-compatible initial data.
//!
//! Given `φ(0) = φ₀`, `∂ₜφ(0) = φ₁` and a magnetic field `F⁰_{jk}`, the potential
//! is chosen in the Coulomb-like form
//!
//! ```text
//! a_{00} = ȧ_{00} = 0
//! a_{0j} = D^{-2} ∂^k F⁰_{jk}          (divergence free, curl = F⁰_{jk})
//! ȧ_{0k} = F⁰_{0k} = ∂_k Δ^{-1}(ρ - mean ρ) + E^{df}_k,    ρ = Im(φ₀ conj φ₁)
//! ```
//!
//! which makes both `u(0) = ∂^μA_μ` and `∂ₜu(0)` vanish. Gauss's law has no
//! solution on the torus for a charged state, so the mean of `ρ` is removed and
//! reported as `dropped_charge`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::current;
use crate::error::{MkgError, Result};
use crate::fields::{faraday_from_potential, Faraday, MkgState};
use crate::grid::TorusGrid;
use crate::multiplier::{
    dealiased_points, derivative, divergence, finish_product, inv_laplacian,
};
use crate::random::random_field;
use crate::snapshot::{load_snapshot, save_snapshot};
use crate::spectral::SpectralScalar;

use num_complex::Complex64;

/// Largest Bianchi residual accepted for a user-supplied magnetic field.
pub const BIANCHI_TOLERANCE: f64 = 1e-8;

/// Residual names, in report order.
pub const RESIDUAL_KEYS: [&str; 7] = [
    "temporal_potential",
    "divergence",
    "curl",
    "electric",
    "gauss",
    "lorenz_u0",
    "lorenz_ut0",
];

/// Source of the magnetic part `F⁰_{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub enum FaradaySeed {
    Zero,
    /// `F⁰_{jk} = ∂_j w_k - ∂_k w_j` for a random smooth real `w` with unit L² components.
    Random { seed: u64, amplitude: f64 },
    /// Spatial components of the given tensor; the `F_{0k}` entries are ignored.
    Given(Faraday),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOptions {
    pub mass: f64,
    /// Spectral width of randomly generated seeds.
    pub width: f64,
    /// Random divergence-free electric field added to `F⁰_{0k}`.
    pub electric: Option<(u64, f64)>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            mass: MkgState::DEFAULT_MASS,
            width: 3.0,
            electric: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub phi0: SpectralScalar,
    pub phi1: SpectralScalar,
    pub a0: Vec<SpectralScalar>,
    pub a0dot: Vec<SpectralScalar>,
    pub f0: Faraday,
    pub mass: f64,
    pub residuals: BTreeMap<String, f64>,
    /// Lattice mean of the charge density that was removed.
    pub dropped_charge: f64,
}

impl InitialData {
    pub fn grid(&self) -> &TorusGrid {
        self.phi0.grid()
    }

    /// Evolution state at `t = 0`.
    pub fn state(&self) -> MkgState {
        MkgState {
            t: 0.0,
            phi: self.phi0.clone(),
            phi_t: self.phi1.clone(),
            a: self.a0.clone(),
            a_t: self.a0dot.clone(),
            mass: self.mass,
        }
    }

    /// Wraps an arbitrary state without enforcing any constraint.
    pub fn from_state(state: &MkgState) -> Self {
        let mut data = Self {
            phi0: state.phi.clone(),
            phi1: state.phi_t.clone(),
            a0: state.a.clone(),
            a0dot: state.a_t.clone(),
            f0: faraday_from_potential(state),
            mass: state.mass,
            residuals: BTreeMap::new(),
            dropped_charge: charge_density(&state.phi, &state.phi_t).mean().re,
        };
        data.residuals = verify_constraints(&data);
        data
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, v| m.max(*v))
    }
}

/// `P(Im(φ₀ conj φ₁))`, formed like the charge density of the evolution.
pub fn charge_density(phi0: &SpectralScalar, phi1: &SpectralScalar) -> SpectralScalar {
    let p = dealiased_points(phi0)
        .zip_with(&dealiased_points(phi1), |a, b| Complex64::new((a * b.conj()).im, 0.0));
    finish_product(&p, true)
}

/// Spatial vector with the divergence removed: `v - ∇Δ^{-1}∇·v`, mean-free.
fn leray(v: &[SpectralScalar]) -> Vec<SpectralScalar> {
    let pot = inv_laplacian(&divergence(v));
    v.iter()
        .enumerate()
        .map(|(j, vj)| {
            let mut out = vj - &derivative(&pot, j);
            out.coeffs_mut()[0] = Complex64::default();
            out
        })
        .collect()
}

fn random_vector(grid: TorusGrid, seed: u64, amplitude: f64, width: f64) -> Vec<SpectralScalar> {
    (0..grid.dim())
        .map(|j| {
            let stream = seed.wrapping_mul(31).wrapping_add(j as u64);
            random_field(grid, stream, true, width).scaled_real(amplitude)
        })
        .collect()
}

/// Magnetic field `∂_j w_k - ∂_k w_j` of a spatial vector `w`.
pub fn curl_faraday(w: &[SpectralScalar]) -> Faraday {
    let grid = *w[0].grid();
    let n = grid.dim();
    let mut f = Faraday::zeros(grid);
    for j in 1..=n {
        for k in j + 1..=n {
            f.set(j, k, derivative(&w[k - 1], j - 1) - derivative(&w[j - 1], k - 1));
        }
    }
    f
}

pub fn build_data(
    phi0: &SpectralScalar,
    phi1: &SpectralScalar,
    seed: &FaradaySeed,
    opts: &BuildOptions,
) -> Result<InitialData> {
    phi0.same_grid(phi1)?;
    if !(phi0.is_finite() && phi1.is_finite()) {
        return Err(MkgError::NonFinite("initial scalar field"));
    }
    let grid = *phi0.grid();
    let n = grid.dim();
    let mut f0 = Faraday::zeros(grid);
    match seed {
        FaradaySeed::Zero => {}
        FaradaySeed::Random { seed, amplitude } => {
            let w = random_vector(grid, *seed, *amplitude, opts.width);
            f0 = curl_faraday(&w);
        }
        FaradaySeed::Given(given) => {
            if given.dim() != n {
                return Err(MkgError::DimensionMismatch {
                    expected: n,
                    got: given.dim(),
                });
            }
            for (j, k) in Faraday::pairs(n).into_iter().filter(|(m, _)| *m > 0) {
                let c = given.get(j, k);
                c.same_grid(phi0)?;
                f0.set(j, k, c.clone());
            }
            let residual = f0.bianchi_residual();
            if !(residual <= BIANCHI_TOLERANCE) {
                return Err(MkgError::BianchiViolation {
                    residual,
                    tolerance: BIANCHI_TOLERANCE,
                });
            }
        }
    }

    // a_{0j} = D^{-2} ∂^k F_{jk} = -Δ^{-1} ∂^k F_{jk}
    let mut a0 = vec![SpectralScalar::zeros(grid, true)];
    for j in 1..=n {
        let mut acc = SpectralScalar::zeros(grid, true);
        for k in 1..=n {
            if k != j {
                acc += &derivative(&f0.component(j, k), k - 1);
            }
        }
        a0.push(-inv_laplacian(&acc));
    }

    let rho = charge_density(phi0, phi1);
    let dropped_charge = rho.mean().re;
    let mut centered = rho;
    centered.coeffs_mut()[0] = Complex64::default();
    let pot = inv_laplacian(&centered);
    let electric_df = match opts.electric {
        Some((s, amp)) => leray(&random_vector(grid, s, amp, opts.width)),
        None => vec![SpectralScalar::zeros(grid, true); n],
    };
    let mut a0dot = vec![SpectralScalar::zeros(grid, true)];
    for k in 1..=n {
        let e = derivative(&pot, k - 1) + &electric_df[k - 1];
        f0.set(0, k, e.clone());
        a0dot.push(e);
    }

    let mut data = InitialData {
        phi0: phi0.clone(),
        phi1: phi1.clone(),
        a0,
        a0dot,
        f0,
        mass: opts.mass,
        residuals: BTreeMap::new(),
        dropped_charge,
    };
    data.residuals = verify_constraints(&data);
    Ok(data)
}

/// Recomputes every constraint residual (L² norms) from the stored fields.
pub fn verify_constraints(data: &InitialData) -> BTreeMap<String, f64> {
    let grid = *data.grid();
    let n = grid.dim();
    let rss = |it: &mut dyn Iterator<Item = f64>| it.map(|x| x * x).sum::<f64>().sqrt();

    let temporal = rss(&mut [data.a0[0].norm_l2(), data.a0dot[0].norm_l2()].into_iter());
    let div = divergence(&data.a0[1..]).norm_l2();
    let curl = rss(&mut (1..=n).flat_map(|j| {
        (j + 1..=n).map(move |k| {
            (derivative(&data.a0[k], j - 1)
                - derivative(&data.a0[j], k - 1)
                - data.f0.get(j, k))
            .norm_l2()
        })
    }));
    let electric = rss(&mut (1..=n).map(|k| (&data.a0dot[k] - data.f0.get(0, k)).norm_l2()));

    // Gauss's law against the mean-free density, pointwise from scratch
    let p0 = data.phi0.to_points();
    let p1 = data.phi1.to_points();
    let mut rho = p0
        .zip_with(&p1, |a, b| Complex64::new((a * b.conj()).im, 0.0))
        .forward_real();
    crate::multiplier::dealias_in_place(&mut rho);
    rho.coeffs_mut()[0] = Complex64::default();
    let e: Vec<SpectralScalar> = (1..=n).map(|k| data.f0.get(0, k).clone()).collect();
    let gauss = (divergence(&e) - &rho).norm_l2();

    let state = data.state();
    let u0 = (divergence(&state.a[1..]) - &state.a_t[0]).norm_l2();
    // ∂ₜu(0) = ∂^j(ȧ_{0j} - ∂_j a_{00}) - (j_0 - mean j_0)
    let mut j0 = current(&state).swap_remove(0);
    j0.coeffs_mut()[0] = Complex64::default();
    let flux: Vec<SpectralScalar> = (1..=n)
        .map(|j| &state.a_t[j] - &derivative(&state.a[0], j - 1))
        .collect();
    let ut0 = (divergence(&flux) - &j0).norm_l2();

    let values = [temporal, div, curl, electric, gauss, u0, ut0];
    RESIDUAL_KEYS
        .iter()
        .zip(values)
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// Adds `iκφ₀` to `φ₁` so that the mean charge density vanishes.
///
/// Returns `None` when `φ₀ = 0`, where no such shift exists.
pub fn neutralize_charge(phi0: &SpectralScalar, phi1: &SpectralScalar) -> Option<SpectralScalar> {
    let q = charge_density(phi0, phi1).mean().re;
    // mean Im(φ₀ conj(iκφ₀)) = -κ mean|φ₀|², with the products dealiased
    let m = crate::multiplier::dealias(phi0).norm_l2().powi(2);
    if m < 1e-300 {
        return None;
    }
    Some(phi1 + &phi0.scaled(Complex64::new(0.0, q / m)))
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    residuals: BTreeMap<String, f64>,
    dropped_charge: f64,
}

/// Path of the JSON sidecar that accompanies a data snapshot.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the data as a `t = 0` snapshot plus a JSON sidecar.
pub fn save_data(path: impl AsRef<Path>, data: &InitialData) -> Result<()> {
    let path = path.as_ref();
    save_snapshot(path, &data.state())?;
    let side = Sidecar {
        residuals: data.residuals.clone(),
        dropped_charge: data.dropped_charge,
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

/// Reads data written by [`save_data`]. `F⁰` is rebuilt from the potential and the
/// residuals are recomputed; the sidecar supplies `dropped_charge` when present.
pub fn load_data(path: impl AsRef<Path>) -> Result<InitialData> {
    let path = path.as_ref();
    let state = load_snapshot(path)?;
    let mut data = InitialData::from_state(&state);
    let side = sidecar_path(path);
    if side.exists() {
        let s: Sidecar = serde_json::from_str(&std::fs::read_to_string(side)?)?;
        data.dropped_charge = s.dropped_charge;
    }
    Ok(data)
}
