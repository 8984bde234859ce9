//! Right-hand sides of the gauge-reduced system
//!
//! ```text
//! □A = N(A, φ) = -Im(φ conj(∂φ)) - A|φ|²
//! □φ = M̃(A, φ) = -2i(A_0 ∂_t φ + D^{-2}∇∂_t A_0 · ∇φ - A^{df}·∇φ) + A_μA^μ φ + m²φ
//! ```
//!
//! with `□ = ∂^μ∂_μ = -∂_t² + Δ`, the current `j_μ = Im(φ conj(∂_μφ)) + |φ|²A_μ`
//! and the wave sources of the Faraday tensor.
//!
//! Quadratic products are formed from dealiased point values and dealiased
//! again. Cubic terms nest two such products, always with `|φ|²` (or `A_μA^μ`)
//! formed first.

use num_complex::Complex64;

use crate::fields::{Faraday, MkgState};
use crate::multiplier::{dealiased_points, derivative, divergence, finish_product, inv_laplacian};
use crate::spectral::{PointField, SpectralScalar};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dealiased point values shared by all right-hand sides.
pub(crate) struct StatePoints {
    pub phi: PointField,
    pub phi_t: PointField,
    /// `∂_j φ`, `j = 1..=n` stored at `j - 1`.
    pub dphi: Vec<PointField>,
    pub a: Vec<PointField>,
    /// `P(|φ|²)` at the grid points.
    pub rho2_pts: PointField,
}

impl StatePoints {
    pub fn new(state: &MkgState) -> Self {
        let n = state.dim();
        let phi = dealiased_points(&state.phi);
        let phi_t = dealiased_points(&state.phi_t);
        let dphi = (0..n)
            .map(|j| dealiased_points(&derivative(&state.phi, j)))
            .collect();
        let a = state.a.iter().map(dealiased_points).collect();
        let rho2 = finish_product(&phi.map(|p| Complex64::new(p.norm_sqr(), 0.0)), true);
        let rho2_pts = rho2.to_points();
        Self {
            phi,
            phi_t,
            dphi,
            a,
            rho2_pts,
        }
    }

    /// `∂_μ φ` in point space (`μ = 0` is the time derivative).
    pub fn dmu(&self, mu: usize) -> &PointField {
        if mu == 0 {
            &self.phi_t
        } else {
            &self.dphi[mu - 1]
        }
    }

    /// `P(Im(φ conj(∂_μφ)))`.
    pub fn im_phi_dphi(&self, mu: usize) -> SpectralScalar {
        let p = self
            .phi
            .zip_with(self.dmu(mu), |a, b| Complex64::new((a * b.conj()).im, 0.0));
        finish_product(&p, true)
    }

    /// `P(P(|φ|²) A_μ)`.
    pub fn rho2_times(&self, a: &PointField) -> SpectralScalar {
        let p = self
            .rho2_pts
            .zip_with(a, |r, v| Complex64::new(r.re * v.re, 0.0));
        finish_product(&p, true)
    }

    /// `P(A_μ A^μ) = P(-A_0² + Σ_j A_j²)`.
    pub fn minkowski_square(&self) -> SpectralScalar {
        let mut acc = PointField::zeros(*self.phi.grid());
        for (i, o) in acc.values_mut().iter_mut().enumerate() {
            let mut v = -self.a[0].values()[i].re.powi(2);
            for aj in &self.a[1..] {
                v += aj.values()[i].re.powi(2);
            }
            *o = Complex64::new(v, 0.0);
        }
        finish_product(&acc, true)
    }
}

/// `j_μ = Im(φ conj(∂_μφ)) + |φ|² A_μ`, `μ = 0..=n`.
pub fn current(state: &MkgState) -> Vec<SpectralScalar> {
    let pts = StatePoints::new(state);
    current_from(&pts, state.dim())
}

pub(crate) fn current_from(pts: &StatePoints, n: usize) -> Vec<SpectralScalar> {
    (0..=n)
        .map(|mu| pts.im_phi_dphi(mu) + pts.rho2_times(&pts.a[mu]))
        .collect()
}

/// `N_μ = -Im(φ conj(∂_μφ)) - A_μ|φ|²`.
pub fn rhs_n(state: &MkgState) -> Vec<SpectralScalar> {
    let pts = StatePoints::new(state);
    rhs_n_from(&pts, state.dim())
}

pub(crate) fn rhs_n_from(pts: &StatePoints, n: usize) -> Vec<SpectralScalar> {
    (0..=n)
        .map(|mu| {
            let grid = *pts.phi.grid();
            let mut quad = PointField::zeros(grid);
            for (i, q) in quad.values_mut().iter_mut().enumerate() {
                let p = pts.phi.values()[i];
                let d = pts.dmu(mu).values()[i];
                *q = Complex64::new(-(p * d.conj()).im, 0.0);
            }
            let cubic = pts.rho2_times(&pts.a[mu]);
            finish_product(&quad, true) - cubic
        })
        .collect()
}

/// `M = 2i A^μ∂_μφ + A_μA^μ φ + m²φ` with `A^μ∂_μφ = -A_0∂_tφ + A_j∂_jφ`.
pub fn rhs_m(state: &MkgState) -> SpectralScalar {
    let pts = StatePoints::new(state);
    let grid = *state.grid();
    let w = pts.minkowski_square().to_points();
    let mut acc = PointField::zeros(grid);
    for (i, o) in acc.values_mut().iter_mut().enumerate() {
        let mut contraction = -pts.a[0].values()[i].re * pts.phi_t.values()[i];
        for j in 0..state.dim() {
            contraction += pts.a[j + 1].values()[i].re * pts.dphi[j].values()[i];
        }
        *o = 2.0 * I * contraction + w.values()[i].re * pts.phi.values()[i];
    }
    finish_product(&acc, false) + state.phi.scaled_real(state.mass * state.mass)
}

/// `M̃`, the Lorenz-gauge reformulation of `M` used for time stepping.
///
/// On the torus the spatial potential has a harmonic (constant) part that is
/// neither divergence- nor curl-free in the Riesz sense; it is kept with
/// `A^{df}` so that `M̃ = M` whenever the Lorenz condition holds.
pub fn rhs_mtilde(state: &MkgState) -> SpectralScalar {
    let pts = StatePoints::new(state);
    rhs_mtilde_from(&pts, state)
}

pub(crate) fn rhs_mtilde_from(pts: &StatePoints, state: &MkgState) -> SpectralScalar {
    let grid = *state.grid();
    let n = state.dim();
    // D^{-2} ∂_j ∂_t A_0: symbol iξ_j / |ξ|²
    let pot = -inv_laplacian(&state.a_t[0]);
    let grad_pot: Vec<PointField> = (0..n)
        .map(|j| dealiased_points(&derivative(&pot, j)))
        .collect();
    let df: Vec<PointField> = divergence_free_with_mean(&state.a[1..])
        .iter()
        .map(dealiased_points)
        .collect();
    let w = pts.minkowski_square().to_points();
    let mut acc = PointField::zeros(grid);
    for (i, o) in acc.values_mut().iter_mut().enumerate() {
        let mut bracket = pts.a[0].values()[i].re * pts.phi_t.values()[i];
        for j in 0..n {
            let dphi = pts.dphi[j].values()[i];
            bracket += (grad_pot[j].values()[i].re - df[j].values()[i].re) * dphi;
        }
        *o = -2.0 * I * bracket + w.values()[i].re * pts.phi.values()[i];
    }
    finish_product(&acc, false) + state.phi.scaled_real(state.mass * state.mass)
}

/// `A^{df}_j + mean(A_j) = A_j - ξ_j (ξ·Â) / |ξ|²`.
fn divergence_free_with_mean(a: &[SpectralScalar]) -> Vec<SpectralScalar> {
    let pot = inv_laplacian(&divergence(a));
    a.iter()
        .enumerate()
        .map(|(j, aj)| aj - &derivative(&pot, j))
        .collect()
}

/// `□F_{μν}` for the stored pairs `μ < ν`.
///
/// ```text
/// □F_{k0} = Im Q_{0k}(φ, conj φ) + ∂_t(A_k|φ|²) - ∂_k(A_0|φ|²)
/// □F_{kl} = Im Q_{lk}(φ, conj φ) + ∂_l(A_k|φ|²) - ∂_k(A_l|φ|²)
/// ```
///
/// `∂_t(A_k|φ|²)` expands as `∂_tA_k |φ|² + A_k · 2Re(conj(φ) ∂_tφ)`.
pub fn faraday_sources(state: &MkgState) -> Faraday {
    faraday_sources_with_sign(state, 1.0)
}

/// As [`faraday_sources`] with the `Im Q_{0k}` term multiplied by `imq_sign`.
pub fn faraday_sources_with_sign(state: &MkgState, imq_sign: f64) -> Faraday {
    let pts = StatePoints::new(state);
    faraday_sources_from(&pts, state, imq_sign)
}

pub(crate) fn faraday_sources_from(pts: &StatePoints, state: &MkgState, imq_sign: f64) -> Faraday {
    let grid = *state.grid();
    let n = state.dim();
    let mut out = Faraday::zeros(grid);
    let a_rho: Vec<SpectralScalar> = pts.a.iter().map(|a| pts.rho2_times(a)).collect();
    // P(2 Re(conj φ ∂_tφ))
    let sigma = finish_product(
        &pts
            .phi
            .zip_with(&pts.phi_t, |p, q| Complex64::new(2.0 * (p.conj() * q).re, 0.0)),
        true,
    )
    .to_points();
    // 2 Im(∂_a φ conj(∂_b φ)) = Im Q_{ab}(φ, conj φ)
    let im_q = |a: usize, b: usize| {
        finish_product(
            &pts.dmu(a)
                .zip_with(pts.dmu(b), |x, y| Complex64::new(2.0 * (x * y.conj()).im, 0.0)),
            true,
        )
    };
    for k in 1..=n {
        let at = dealiased_points(&state.a_t[k]);
        let mut dt_term = PointField::zeros(grid);
        for (i, o) in dt_term.values_mut().iter_mut().enumerate() {
            let v = pts.rho2_pts.values()[i].re * at.values()[i].re
                + sigma.values()[i].re * pts.a[k].values()[i].re;
            *o = Complex64::new(v, 0.0);
        }
        let s_k0 = im_q(0, k).scaled_real(imq_sign) + finish_product(&dt_term, true)
            - derivative(&a_rho[0], k - 1);
        // F_{0k} = -F_{k0}
        out.set(0, k, -s_k0);
    }
    for j in 1..=n {
        for k in j + 1..=n {
            // □F_{jk} = Im Q_{kj}(φ, conj φ) + ∂_k(A_j|φ|²) - ∂_j(A_k|φ|²)
            let s = im_q(k, j) + derivative(&a_rho[j], k - 1) - derivative(&a_rho[k], j - 1);
            out.set(j, k, s);
        }
    }
    out
}
