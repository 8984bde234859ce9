//! Fourier multipliers on spatial fields.
//!
//! Negative powers of `D`, Riesz transforms and the inverse Laplacian annihilate
//! the zero mode: on the torus the mean is the only obstruction to inverting `D`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result, Warning};
use crate::grid::Wavevector;
use crate::spectral::{PointField, SpectralScalar};

/// Relative size of the zero mode above which `D^α`, `α < 0`, reports a dropped mean.
pub const MEAN_DROP_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MultiplierKind {
    /// `⟨ξ⟩^α`
    Lambda,
    /// `|ξ|^α`
    D,
    /// `||τ| - |ξ||^α` (space-time only)
    Dminus,
    /// `(|τ| + |ξ|)^α` (space-time only)
    Dplus,
    /// `⟨|τ| + |ξ|⟩^α` (space-time only)
    LambdaPlus,
    /// `R_k = iξ_k/|ξ|`, axis `k` counted from zero.
    Riesz(usize),
    /// `-1/|ξ|²`
    InverseLaplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSymbol {
    pub kind: MultiplierKind,
    pub exponent: f64,
}

impl MultiplierSymbol {
    pub fn new(kind: MultiplierKind, exponent: f64) -> Self {
        Self { kind, exponent }
    }

    pub fn lambda(alpha: f64) -> Self {
        Self::new(MultiplierKind::Lambda, alpha)
    }

    pub fn d(alpha: f64) -> Self {
        Self::new(MultiplierKind::D, alpha)
    }

    pub fn riesz(axis: usize) -> Self {
        Self::new(MultiplierKind::Riesz(axis), 1.0)
    }

    pub fn inverse_laplacian() -> Self {
        Self::new(MultiplierKind::InverseLaplacian, -2.0)
    }

    pub fn is_spatial(&self) -> bool {
        !matches!(
            self.kind,
            MultiplierKind::Dminus | MultiplierKind::Dplus | MultiplierKind::LambdaPlus
        )
    }

    fn name(&self) -> &'static str {
        match self.kind {
            MultiplierKind::Lambda => "Lambda",
            MultiplierKind::D => "D",
            MultiplierKind::Dminus => "Dminus",
            MultiplierKind::Dplus => "Dplus",
            MultiplierKind::LambdaPlus => "LambdaPlus",
            MultiplierKind::Riesz(_) => "Riesz",
            MultiplierKind::InverseLaplacian => "InverseLaplacian",
        }
    }

    /// Whether the symbol is set to zero at `ξ = 0`.
    pub fn kills_mean(&self) -> bool {
        match self.kind {
            MultiplierKind::D => self.exponent < 0.0,
            MultiplierKind::Riesz(_) | MultiplierKind::InverseLaplacian => true,
            _ => false,
        }
    }

    /// Spatial symbol at `ξ`; `None` for space-time symbols.
    pub fn spatial_symbol(&self, k: &Wavevector) -> Option<Complex64> {
        let alpha = self.exponent;
        let k2 = k.norm_sqr();
        let value = match self.kind {
            MultiplierKind::Lambda => Complex64::new((1.0 + k2).powf(alpha / 2.0), 0.0),
            MultiplierKind::D => {
                if k2 == 0.0 {
                    if alpha > 0.0 {
                        Complex64::default()
                    } else if alpha == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::default()
                    }
                } else {
                    Complex64::new(k2.powf(alpha / 2.0), 0.0)
                }
            }
            MultiplierKind::Riesz(axis) => {
                if k2 == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, k.k[axis] / k2.sqrt())
                }
            }
            MultiplierKind::InverseLaplacian => {
                if k2 == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(-1.0 / k2, 0.0)
                }
            }
            MultiplierKind::Dminus | MultiplierKind::Dplus | MultiplierKind::LambdaPlus => {
                return None
            }
        };
        Some(value)
    }

    /// Symbol at space-time frequency `(τ, ξ)`; spatial kinds ignore `τ`.
    pub fn spacetime_symbol(&self, tau: f64, k: &Wavevector) -> Complex64 {
        let a = self.exponent;
        let kn = k.norm();
        let pow = |x: f64| {
            if x == 0.0 {
                if a == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                x.powf(a)
            }
        };
        match self.kind {
            MultiplierKind::Dminus => Complex64::new(pow((tau.abs() - kn).abs()), 0.0),
            MultiplierKind::Dplus => Complex64::new(pow(tau.abs() + kn), 0.0),
            MultiplierKind::LambdaPlus => {
                let s = tau.abs() + kn;
                Complex64::new((1.0 + s * s).powf(a / 2.0), 0.0)
            }
            _ => self.spatial_symbol(k).expect("spatial kind"),
        }
    }
}

/// Apply a spatial multiplier; warnings report a non-negligible dropped mean.
pub fn apply_multiplier(
    f: &SpectralScalar,
    m: &MultiplierSymbol,
) -> Result<(SpectralScalar, Vec<Warning>)> {
    if !m.is_spatial() {
        return Err(MkgError::SpaceTimeSymbol(m.name()));
    }
    if !f.is_finite() {
        return Err(MkgError::NonFinite("multiplier input"));
    }
    let mut warnings = Vec::new();
    if matches!(m.kind, MultiplierKind::D) && m.exponent < 0.0 {
        let mean = f.mean().norm();
        if mean > MEAN_DROP_THRESHOLD * f.norm_l2() {
            log::warn!("D^{} dropped a mean of magnitude {mean:.3e}", m.exponent);
            warnings.push(Warning::MeanDropped { magnitude: mean });
        }
    }
    let out = f.map_symbol(|k| m.spatial_symbol(k).expect("spatial"));
    Ok((out, warnings))
}

/// `Δ^{-1}` with the mean removed: `coeffs(ξ) ↦ -coeffs(ξ)/|ξ|²`, `coeffs(0) ↦ 0`.
pub fn inv_laplacian(f: &SpectralScalar) -> SpectralScalar {
    let table = f.grid().mode_table();
    let mut out = f.clone();
    for (c, &k2) in out.coeffs_mut().iter_mut().zip(&table.norm_sqr) {
        *c = if k2 == 0.0 { Complex64::default() } else { *c * (-1.0 / k2) };
    }
    out
}

/// Spectral Laplacian, symbol `-|ξ|²`.
pub fn laplacian(f: &SpectralScalar) -> SpectralScalar {
    let table = f.grid().mode_table();
    let mut out = f.clone();
    for (c, &k2) in out.coeffs_mut().iter_mut().zip(&table.norm_sqr) {
        *c *= -k2;
    }
    out
}

/// `∂_axis`, symbol `iξ_axis`.
pub fn derivative(f: &SpectralScalar, axis: usize) -> SpectralScalar {
    let mut out = f.clone();
    let coeffs = out.coeffs_mut();
    f.grid().for_each_axis_freq(axis, |flat, k| {
        let c = coeffs[flat];
        coeffs[flat] = Complex64::new(-k * c.im, k * c.re);
    });
    out
}

pub fn gradient(f: &SpectralScalar) -> Vec<SpectralScalar> {
    (0..f.grid().dim()).map(|j| derivative(f, j)).collect()
}

/// `Σ_j ∂_j v_j`.
pub fn divergence(v: &[SpectralScalar]) -> SpectralScalar {
    let grid = *v[0].grid();
    let mut out = SpectralScalar::zeros(grid, v.iter().all(|c| c.is_real()));
    let acc = out.coeffs_mut();
    for (j, comp) in v.iter().enumerate() {
        let c = comp.coeffs();
        grid.for_each_axis_freq(j, |flat, k| {
            acc[flat] += Complex64::new(-k * c[flat].im, k * c[flat].re);
        });
    }
    out
}

/// `D^α` with the zero-mode convention for `α < 0`.
pub fn d_power(f: &SpectralScalar, alpha: f64) -> SpectralScalar {
    let m = MultiplierSymbol::d(alpha);
    f.map_symbol(|k| m.spatial_symbol(k).expect("spatial"))
}

/// `Λ^α`.
pub fn lambda_power(f: &SpectralScalar, alpha: f64) -> SpectralScalar {
    f.map_real_symbol(|k| (1.0 + k.norm_sqr()).powf(alpha / 2.0))
}

/// Riesz transform `R_axis = D^{-1} ∂_axis`.
pub fn riesz(f: &SpectralScalar, axis: usize) -> SpectralScalar {
    let m = MultiplierSymbol::riesz(axis);
    f.map_symbol(|k| m.spatial_symbol(k).expect("spatial"))
}

/// Zero every coefficient with some `|ξ_i| > ρ N`.
pub fn dealias(f: &SpectralScalar) -> SpectralScalar {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

/// In-place variant of [`dealias`].
pub fn dealias_in_place(f: &mut SpectralScalar) {
    let table = f.grid().mode_table();
    for (c, keep) in f.coeffs_mut().iter_mut().zip(&table.keep) {
        if !keep {
            *c = Complex64::default();
        }
    }
}

/// Point values of the dealiased field, ready for pointwise products.
pub fn dealiased_points(f: &SpectralScalar) -> PointField {
    dealias(f).to_points()
}

/// Transform a pointwise product back and dealias; real fields keep Hermitian symmetry.
pub fn finish_product(p: &PointField, is_real: bool) -> SpectralScalar {
    let mut out = if is_real {
        p.forward_real()
    } else {
        p.forward()
    };
    dealias_in_place(&mut out);
    out
}
