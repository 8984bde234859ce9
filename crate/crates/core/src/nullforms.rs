//! Null forms, the Helmholtz split of the spatial potential and the null
//! structure of `A^μ ∂_μ φ`.
//!
//! # Index conventions
//!
//! | quantity            | convention                                   |
//! |---------------------|----------------------------------------------|
//! | metric              | `diag(-1, 1, …, 1)`                          |
//! | stored potential    | lowered: `state.a[μ] = A_μ`                  |
//! | raised time index   | `A^0 = -A_0`, `∂^0 = -∂_t`                   |
//! | raised space index  | `A^j = A_j`, `∂^j = ∂_j`                     |
//! | Riesz transform     | `R_j = D^{-1} ∂_j`, symbol `iξ_j/|ξ|`        |
//! | `D^{-1}`, `D^{-2}`  | symbols `1/|ξ|`, `1/|ξ|²`, zero at `ξ = 0`   |
//! | Lorenz residual     | `u = ∂^μ A_μ = -∂_t A_0 + ∂_j A_j`           |
//!
//! With these, `A^μ ∂_μ φ = -A_0 ∂_t φ + A_j ∂_j φ`.
//!
//! The magnetic term is `P2 = -½ Σ_{j≠k} Q_{jk}(D^{-1}(R_j A_k - R_k A_j), φ)`,
//! summed over all ordered pairs. The inner multiplier must be the homogeneous
//! `D^{-1}` for `P1 + P2 = A^μ ∂_μ φ` to hold exactly.

use num_complex::Complex64;

use crate::fields::MkgState;
use crate::multiplier::{d_power, dealiased_points, derivative, divergence, finish_product, riesz};
use crate::spectral::{PointField, SpectralScalar};

/// A field together with its time derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldWithTimeDeriv {
    pub f: SpectralScalar,
    pub f_t: SpectralScalar,
}

impl FieldWithTimeDeriv {
    pub fn new(f: SpectralScalar, f_t: SpectralScalar) -> Self {
        debug_assert_eq!(f.grid(), f_t.grid());
        Self { f, f_t }
    }

    /// `∂_α` with `α = 0` the stored time derivative.
    pub fn partial(&self, alpha: usize) -> SpectralScalar {
        if alpha == 0 {
            self.f_t.clone()
        } else {
            derivative(&self.f, alpha - 1)
        }
    }

    pub fn is_real(&self) -> bool {
        self.f.is_real() && self.f_t.is_real()
    }
}

/// `Q_{αβ}(u, v) = ∂_α u ∂_β v - ∂_β u ∂_α v`, dealiased.
pub fn null_form(
    alpha: usize,
    beta: usize,
    u: &FieldWithTimeDeriv,
    v: &FieldWithTimeDeriv,
) -> SpectralScalar {
    let grid = *u.f.grid();
    let is_real = u.is_real() && v.is_real();
    if alpha == beta {
        return SpectralScalar::zeros(grid, is_real);
    }
    let ua = dealiased_points(&u.partial(alpha));
    let ub = dealiased_points(&u.partial(beta));
    let va = dealiased_points(&v.partial(alpha));
    let vb = dealiased_points(&v.partial(beta));
    let mut out = PointField::zeros(grid);
    for (i, o) in out.values_mut().iter_mut().enumerate() {
        *o = ua.values()[i] * vb.values()[i] - ub.values()[i] * va.values()[i];
    }
    finish_product(&out, is_real)
}

/// Helmholtz decomposition of a spatial vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzSplit {
    /// `A^df_j = R^k (R_j A_k - R_k A_j)`
    pub df: Vec<SpectralScalar>,
    /// `A^cf_j = -R_j R_k A^k`
    pub cf: Vec<SpectralScalar>,
    /// Zero modes of `A_j`, which belong to neither part.
    pub mean: Vec<Complex64>,
}

pub fn helmholtz_split(a: &[SpectralScalar]) -> HelmholtzSplit {
    let n = a.len();
    let r: Vec<Vec<SpectralScalar>> = (0..n)
        .map(|j| (0..n).map(|k| riesz(&a[k], j)).collect())
        .collect();
    // r[j][k] = R_j A_k
    let mut df = Vec::with_capacity(n);
    let mut cf = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = SpectralScalar::zeros(*a[0].grid(), a[j].is_real());
        let mut c = SpectralScalar::zeros(*a[0].grid(), a[j].is_real());
        for k in 0..n {
            d += &riesz(&(&r[j][k] - &r[k][j]), k);
            c -= &riesz(&r[k][k], j);
        }
        df.push(d);
        cf.push(c);
    }
    HelmholtzSplit {
        df,
        cf,
        mean: a.iter().map(|c| c.mean()).collect(),
    }
}

/// Terms of the null-structure identity `A^μ ∂_μ φ = P1 + P2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    /// `-Q_{0j}(D^{-1} R^j A_0, φ)`
    pub p1: SpectralScalar,
    /// `-½ Q_{jk}(D^{-1}(R^j A^k - R^k A^j), φ)`
    pub p2: SpectralScalar,
    /// `A^μ ∂_μ φ = -A_0 ∂_t φ + A_j ∂_j φ`
    pub direct: SpectralScalar,
    /// `‖-∂_t A_0 + ∂^j A_j‖_{L²}`
    pub lorenz_residual: f64,
}

impl Interaction {
    /// `‖P1 + P2 - direct‖ / max(‖direct‖, tiny)`.
    pub fn relative_mismatch(&self) -> f64 {
        let gap = (&(&self.p1 + &self.p2) - &self.direct).norm_l2();
        gap / self.direct.norm_l2().max(f64::MIN_POSITIVE)
    }
}

pub fn decompose_interaction(state: &MkgState) -> Interaction {
    decompose_interaction_with_sign(state, 1.0)
}

/// As [`decompose_interaction`], with every Riesz transform multiplied by
/// `riesz_sign`. A sign of `-1` is a deliberately corrupted operator used as a
/// negative control.
pub fn decompose_interaction_with_sign(state: &MkgState, riesz_sign: f64) -> Interaction {
    let grid = *state.grid();
    let n = grid.dim();
    let phi = FieldWithTimeDeriv::new(state.phi.clone(), state.phi_t.clone());
    let rz = |f: &SpectralScalar, j: usize| riesz(f, j).scaled_real(riesz_sign);

    let mut p1 = SpectralScalar::zeros(grid, false);
    for j in 1..=n {
        let x = FieldWithTimeDeriv::new(
            d_power(&rz(&state.a[0], j - 1), -1.0),
            d_power(&rz(&state.a_t[0], j - 1), -1.0),
        );
        p1 -= &null_form(0, j, &x, &phi);
    }

    let zero = SpectralScalar::zeros(grid, true);
    let mut p2 = SpectralScalar::zeros(grid, false);
    for j in 1..=n {
        for k in 1..=n {
            if j == k {
                continue;
            }
            let y = d_power(&(rz(&state.a[k], j - 1) - rz(&state.a[j], k - 1)), -1.0);
            let y = FieldWithTimeDeriv::new(y, zero.clone());
            p2.axpy(Complex64::new(-0.5, 0.0), &null_form(j, k, &y, &phi));
        }
    }

    let phi_t_pts = dealiased_points(&state.phi_t);
    let a0_pts = dealiased_points(&state.a[0]);
    let mut acc: Vec<Complex64> = a0_pts
        .values()
        .iter()
        .zip(phi_t_pts.values())
        .map(|(a, p)| -a * p)
        .collect();
    for j in 1..=n {
        let aj = dealiased_points(&state.a[j]);
        let dphi = dealiased_points(&derivative(&state.phi, j - 1));
        for (i, v) in acc.iter_mut().enumerate() {
            *v += aj.values()[i] * dphi.values()[i];
        }
    }
    let direct = finish_product(
        &PointField::from_values(grid, acc).expect("finite"),
        false,
    );

    let lorenz = divergence(&state.a[1..]) - &state.a_t[0];
    Interaction {
        p1,
        p2,
        direct,
        lorenz_residual: lorenz.norm_l2(),
    }
}
