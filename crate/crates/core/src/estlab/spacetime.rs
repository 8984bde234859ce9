//! Fields on the space-time lattice `[0, 2π) × Tⁿ`.
//!
//! Coefficients are stored τ-major: the entry for `(τ, ξ)` lives at
//! `it * grid.len() + flat` with `it` the FFT-order index of `τ`. The transform
//! is normalized like the spatial one, `c(τ, ξ) = (N_t Nⁿ)^{-1} Σ u e^{-i(τt + ξ·x)}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result, Warning};
use crate::fft;
use crate::grid::TorusGrid;
use crate::multiplier::{MultiplierSymbol, MEAN_DROP_THRESHOLD};

/// Temporal taper applied before the time transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    None,
    /// `w(t) = sin²(t/2)`, vanishing to second order at the period ends.
    #[default]
    CosineSquared,
}

impl Window {
    pub fn weight(&self, t: f64) -> f64 {
        match self {
            Window::None => 1.0,
            Window::CosineSquared => (0.5 * t).sin().powi(2),
        }
    }
}

/// `t_j = 2πj / N_t`.
pub fn time_points(nt: usize) -> Vec<f64> {
    (0..nt)
        .map(|j| std::f64::consts::TAU * j as f64 / nt as f64)
        .collect()
}

/// Temporal frequency at FFT-order index `it`.
#[inline]
pub fn tau_of(it: usize, nt: usize) -> i64 {
    if it <= nt / 2 {
        it as i64
    } else {
        it as i64 - nt as i64
    }
}

#[inline]
pub(crate) fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

pub(crate) fn check_nt(nt: usize) -> Result<()> {
    if nt < 2 || nt % 2 != 0 {
        return Err(MkgError::InvalidProbe(format!(
            "temporal points must be even and >= 2, got {nt}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: TorusGrid,
    nt: usize,
    coeffs: Vec<Complex64>,
    window: Window,
}

impl SpaceTimeField {
    pub fn zeros(grid: TorusGrid, nt: usize, window: Window) -> Result<Self> {
        check_nt(nt)?;
        Ok(Self {
            grid,
            nt,
            coeffs: vec![Complex64::default(); nt * grid.len()],
            window,
        })
    }

    pub fn from_coeffs(grid: TorusGrid, nt: usize, coeffs: Vec<Complex64>, window: Window) -> Result<Self> {
        check_nt(nt)?;
        check(&coeffs, nt * grid.len(), "space-time coefficients")?;
        Ok(Self {
            grid,
            nt,
            coeffs,
            window,
        })
    }

    /// Forward transform of lattice values `u(t_j, x)` (already windowed, if at all).
    pub fn from_point_values(grid: TorusGrid, nt: usize, mut values: Vec<Complex64>, window: Window) -> Result<Self> {
        check_nt(nt)?;
        check(&values, nt * grid.len(), "space-time values")?;
        fft::transform_nd(&mut values, &shape(&grid, nt), false);
        let scale = 1.0 / values.len() as f64;
        for v in &mut values {
            *v *= scale;
        }
        Ok(Self {
            grid,
            nt,
            coeffs: values,
            window,
        })
    }

    /// Lattice values `u(t_j, x)`, same layout as the coefficients.
    pub fn to_point_values(&self) -> Vec<Complex64> {
        let mut values = self.coeffs.clone();
        fft::transform_nd(&mut values, &shape(&self.grid, self.nt), true);
        values
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, tau: i64, k: &[i64]) -> Complex64 {
        let it = tau.rem_euclid(self.nt as i64) as usize;
        self.coeffs[it * self.grid.len() + self.grid.flat_index(k)]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v *= c;
        }
        out
    }

    /// Space-time L² norm (mean-square convention, equal to `hsb_norm(0, 0)`).
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖⟨ξ⟩^s ⟨|τ| - |ξ|⟩^b û‖_{ℓ²}`.
    pub fn hsb_norm(&self, s: f64, b: f64) -> f64 {
        let table = self.grid.mode_table();
        let spatial: Vec<f64> = table.norm_sqr.iter().map(|k2| (1.0 + k2).powf(s)).collect();
        let mut acc = 0.0;
        for (it, row) in self.coeffs.chunks(self.grid.len()).enumerate() {
            let tau = tau_of(it, self.nt).abs() as f64;
            for (flat, c) in row.iter().enumerate() {
                let m = japanese(tau - table.norm_sqr[flat].sqrt());
                acc += spatial[flat] * m.powf(2.0 * b) * c.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Homogeneous variant with `|ξ|` in place of `⟨ξ⟩`; the `ξ = 0` plane is
    /// excluded and reported when it carries non-negligible content.
    pub fn hsb_norm_homogeneous(&self, s: f64, b: f64) -> (f64, Vec<Warning>) {
        let table = self.grid.mode_table();
        let mut acc = 0.0;
        let mut dropped = 0.0;
        let mut total = 0.0;
        for (it, row) in self.coeffs.chunks(self.grid.len()).enumerate() {
            let tau = tau_of(it, self.nt).abs() as f64;
            for (flat, c) in row.iter().enumerate() {
                let k2 = table.norm_sqr[flat];
                total += c.norm_sqr();
                if k2 == 0.0 {
                    dropped += c.norm_sqr();
                    continue;
                }
                let m = japanese(tau - k2.sqrt());
                acc += k2.powf(s) * m.powf(2.0 * b) * c.norm_sqr();
            }
        }
        let mut warnings = Vec::new();
        let (dropped, total) = (dropped.sqrt(), total.sqrt());
        if total > 0.0 && dropped > MEAN_DROP_THRESHOLD * total {
            warnings.push(Warning::MeanDropped { magnitude: dropped });
        }
        (acc.sqrt(), warnings)
    }

    /// Multiplies by `m(τ, ξ)`; spatial symbols ignore `τ`.
    pub fn apply_multiplier(&self, m: &MultiplierSymbol) -> Self {
        let mut out = self.clone();
        let wave: Vec<_> = (0..self.grid.len()).map(|f| self.grid.wavevector(f)).collect();
        for (it, row) in out.coeffs.chunks_mut(self.grid.len()).enumerate() {
            let tau = tau_of(it, self.nt) as f64;
            for (flat, c) in row.iter_mut().enumerate() {
                *c *= m.spacetime_symbol(tau, &wave[flat]);
            }
        }
        out
    }

    /// Entrywise `|û|`.
    pub fn abs(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = Complex64::new(c.norm(), 0.0);
        }
        out
    }

    /// Coefficients of the lattice product `u·v` (a cyclic convolution of the spectra).
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.nt != other.nt {
            return Err(MkgError::GridMismatch);
        }
        let a = self.to_point_values();
        let b = other.to_point_values();
        let values = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_point_values(self.grid, self.nt, values, self.window)
    }
}

impl std::ops::Add<&SpaceTimeField> for &SpaceTimeField {
    type Output = SpaceTimeField;

    fn add(self, rhs: &SpaceTimeField) -> SpaceTimeField {
        assert!(self.grid == rhs.grid && self.nt == rhs.nt, "lattice mismatch");
        let mut out = self.clone();
        for (o, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *o += r;
        }
        out
    }
}

fn shape(grid: &TorusGrid, nt: usize) -> Vec<usize> {
    let mut s = vec![nt];
    s.extend(std::iter::repeat(grid.size()).take(grid.dim()));
    s
}

fn check(values: &[Complex64], expected: usize, what: &'static str) -> Result<()> {
    if values.len() != expected {
        return Err(MkgError::DimensionMismatch {
            expected,
            got: values.len(),
        });
    }
    if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(MkgError::NonFinite(what));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::stream_rng;
    use rand::Rng;

    fn random_st(grid: TorusGrid, nt: usize, seed: u64) -> SpaceTimeField {
        let mut rng = stream_rng(seed, 0);
        let c = (0..nt * grid.len())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        SpaceTimeField::from_coeffs(grid, nt, c, Window::None).unwrap()
    }

    #[test]
    fn single_mode_norm() {
        let g = TorusGrid::new(2, 8).unwrap();
        let mut f = SpaceTimeField::zeros(g, 8, Window::None).unwrap();
        let i = g.len() + g.flat_index(&[1, 0]);
        f.coeffs_mut()[i] = Complex64::new(1.0, 0.0);
        assert!((f.hsb_norm(1.0, 0.5) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.coeff(1, &[1, 0]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn parseval_and_roundtrip() {
        let g = TorusGrid::new(2, 8).unwrap();
        let f = random_st(g, 6, 1);
        let pts = f.to_point_values();
        let mean_sq = pts.iter().map(|v| v.norm_sqr()).sum::<f64>() / pts.len() as f64;
        assert!((mean_sq.sqrt() - f.hsb_norm(0.0, 0.0)).abs() < 1e-12 * f.norm_l2());
        let back = SpaceTimeField::from_point_values(g, 6, pts, Window::None).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn homogeneous_norm_reports_zero_plane() {
        let g = TorusGrid::new(1, 8).unwrap();
        let mut f = SpaceTimeField::zeros(g, 4, Window::None).unwrap();
        f.coeffs_mut()[0] = Complex64::new(1.0, 0.0);
        f.coeffs_mut()[1] = Complex64::new(1.0, 0.0);
        let (n, w) = f.hsb_norm_homogeneous(1.0, 0.0);
        assert!((n - 1.0).abs() < 1e-15);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn product_matches_pointwise() {
        let g = TorusGrid::new(1, 8).unwrap();
        let a = random_st(g, 4, 2);
        let b = random_st(g, 4, 3);
        let p = a.product(&b).unwrap().to_point_values();
        let (pa, pb) = (a.to_point_values(), b.to_point_values());
        for i in 0..p.len() {
            assert!((p[i] - pa[i] * pb[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        let g = TorusGrid::new(1, 8).unwrap();
        assert!(SpaceTimeField::zeros(g, 3, Window::None).is_err());
        assert!(SpaceTimeField::from_coeffs(g, 4, vec![Complex64::default(); 5], Window::None).is_err());
    }
}
