//! Field aggregates: the evolved state, the Faraday tensor and Sobolev norms.

use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result};
use crate::grid::TorusGrid;
use crate::multiplier::derivative;
use crate::spectral::SpectralScalar;

/// `(φ, ∂ₜφ, A_0..A_n, ∂ₜA_0..∂ₜA_n)` at time `t`. Indices on `a` are lowered.
#[derive(Debug, Clone, PartialEq)]
pub struct MkgState {
    pub t: f64,
    pub phi: SpectralScalar,
    pub phi_t: SpectralScalar,
    pub a: Vec<SpectralScalar>,
    pub a_t: Vec<SpectralScalar>,
    pub mass: f64,
}

impl MkgState {
    pub const DEFAULT_MASS: f64 = 1.0;

    pub fn zeros(grid: TorusGrid, mass: f64) -> Self {
        let n = grid.dim();
        Self {
            t: 0.0,
            phi: SpectralScalar::zeros(grid, false),
            phi_t: SpectralScalar::zeros(grid, false),
            a: vec![SpectralScalar::zeros(grid, true); n + 1],
            a_t: vec![SpectralScalar::zeros(grid, true); n + 1],
            mass,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.phi.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.a.len() != n + 1 || self.a_t.len() != n + 1 {
            return Err(MkgError::DimensionMismatch {
                expected: n + 1,
                got: self.a.len().min(self.a_t.len()),
            });
        }
        if !(self.mass >= 0.0) {
            return Err(MkgError::InvalidScheme(format!("mass {} < 0", self.mass)));
        }
        for f in self.fields() {
            f.same_grid(&self.phi)?;
            if !f.is_finite() {
                return Err(MkgError::NonFinite("state"));
            }
        }
        Ok(())
    }

    /// All fields in snapshot order: `phi, phi_t, a[0..=n], a_t[0..=n]`.
    pub fn fields(&self) -> impl Iterator<Item = &SpectralScalar> {
        [&self.phi, &self.phi_t]
            .into_iter()
            .chain(self.a.iter())
            .chain(self.a_t.iter())
    }

    pub fn fields_mut(&mut self) -> impl Iterator<Item = &mut SpectralScalar> {
        [&mut self.phi, &mut self.phi_t]
            .into_iter()
            .chain(self.a.iter_mut())
            .chain(self.a_t.iter_mut())
    }

    pub fn is_finite(&self) -> bool {
        self.fields().all(|f| f.is_finite())
    }

    /// Multiply `(φ, ∂ₜφ)` by a constant phase `e^{iθ}`.
    pub fn rotate_phase(&self, theta: f64) -> Self {
        let z = num_complex::Complex64::from_polar(1.0, theta);
        let mut out = self.clone();
        out.phi = self.phi.scaled(z);
        out.phi_t = self.phi_t.scaled(z);
        out
    }
}

/// Antisymmetric `F_{μν}` stored for `μ < ν` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Faraday {
    dim: usize,
    components: Vec<SpectralScalar>,
}

impl Faraday {
    pub fn zeros(grid: TorusGrid) -> Self {
        let dim = grid.dim();
        Self {
            dim,
            components: vec![SpectralScalar::zeros(grid, true); (dim + 1) * dim / 2],
        }
    }

    /// Number of stored components for spatial dimension `n`.
    pub fn stored_len(dim: usize) -> usize {
        (dim + 1) * dim / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Storage slot of the pair `μ < ν`.
    pub fn slot(dim: usize, mu: usize, nu: usize) -> usize {
        debug_assert!(mu < nu && nu <= dim);
        // rows of length dim, dim-1, ...
        mu * (2 * dim + 1 - mu) / 2 + (nu - mu - 1)
    }

    /// Ordered pairs `(μ, ν)` with `μ < ν` in storage order.
    pub fn pairs(dim: usize) -> Vec<(usize, usize)> {
        (0..=dim)
            .flat_map(|mu| (mu + 1..=dim).map(move |nu| (mu, nu)))
            .collect()
    }

    /// Stored component `F_{μν}` for `μ < ν`.
    pub fn get(&self, mu: usize, nu: usize) -> &SpectralScalar {
        &self.components[Self::slot(self.dim, mu, nu)]
    }

    pub fn get_mut(&mut self, mu: usize, nu: usize) -> &mut SpectralScalar {
        let s = Self::slot(self.dim, mu, nu);
        &mut self.components[s]
    }

    pub fn set(&mut self, mu: usize, nu: usize, f: SpectralScalar) {
        *self.get_mut(mu, nu) = f;
    }

    /// `F_{μν}` for any pair, using antisymmetry; the diagonal is zero.
    pub fn component(&self, mu: usize, nu: usize) -> SpectralScalar {
        match mu.cmp(&nu) {
            std::cmp::Ordering::Less => self.get(mu, nu).clone(),
            std::cmp::Ordering::Greater => -self.get(nu, mu),
            std::cmp::Ordering::Equal => {
                SpectralScalar::zeros(*self.components[0].grid(), true)
            }
        }
    }

    pub fn components(&self) -> &[SpectralScalar] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [SpectralScalar] {
        &mut self.components
    }

    /// Root-sum-square L² norm over stored components.
    pub fn norm_l2(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.norm_l2().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// RSS of `‖self_{μν} - other_{μν}‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm_l2().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// L² size of `∂_l F_{jk} + ∂_j F_{kl} + ∂_k F_{lj}` over spatial triples `j<k<l`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim;
        let mut total = 0.0;
        for j in 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let r = derivative(&self.component(j, k), l - 1)
                        + derivative(&self.component(k, l), j - 1)
                        + derivative(&self.component(l, j), k - 1);
                    total += r.norm_l2().powi(2);
                }
            }
        }
        total.sqrt()
    }
}

/// `F_{0k} = ∂ₜA_k - ∂_k A_0`, `F_{jk} = ∂_j A_k - ∂_k A_j`.
pub fn faraday_from_potential(state: &MkgState) -> Faraday {
    let grid = *state.grid();
    let n = grid.dim();
    let mut f = Faraday::zeros(grid);
    for k in 1..=n {
        f.set(0, k, &state.a_t[k] - &derivative(&state.a[0], k - 1));
    }
    for j in 1..=n {
        for k in j + 1..=n {
            f.set(
                j,
                k,
                derivative(&state.a[k], j - 1) - derivative(&state.a[j], k - 1),
            );
        }
    }
    f
}

/// `(Σ_ξ ⟨ξ⟩^{2s} |coeffs(ξ)|²)^{1/2}`.
pub fn sobolev_norm(f: &SpectralScalar, s: f64) -> f64 {
    f.grid()
        .modes()
        .map(|(flat, k)| (1.0 + k.norm_sqr()).powf(s) * f.coeffs()[flat].norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Regularity exponents `(s, r, ε)` of the well-posedness statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevExponents {
    pub s: f64,
    pub r: f64,
    pub epsilon: f64,
}

impl Default for SobolevExponents {
    fn default() -> Self {
        Self {
            s: 1.0,
            r: 1.0,
            epsilon: 0.05,
        }
    }
}

impl SobolevExponents {
    /// Human-readable list of violated hypotheses for spatial dimension `n`.
    pub fn violations(&self, n: usize) -> Vec<String> {
        let n = n as f64;
        let (s, r) = (self.s, self.r);
        let checks = [
            (s > n / 2.0 - 5.0 / 6.0, format!("s > n/2 - 5/6 = {}", n / 2.0 - 5.0 / 6.0)),
            (r > n / 2.0 - 1.0, format!("r > n/2 - 1 = {}", n / 2.0 - 1.0)),
            (s >= r, "s >= r".to_string()),
            (r >= s - 0.5, "r >= s - 1/2".to_string()),
            (
                3.0 * s - 2.0 * r > (n - 1.0) / 2.0,
                format!("3s - 2r > (n-1)/2 = {}", (n - 1.0) / 2.0),
            ),
            (
                2.0 * r - s > (n - 3.0) / 2.0,
                format!("2r - s > (n-3)/2 = {}", (n - 3.0) / 2.0),
            ),
            (self.epsilon > 0.0, "epsilon > 0".to_string()),
        ];
        checks
            .into_iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, msg)| msg)
            .collect()
    }

    pub fn is_admissible(&self, n: usize) -> bool {
        self.violations(n).is_empty()
    }
}
