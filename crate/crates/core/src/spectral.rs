//! Spectral and point-space scalar fields on a [`TorusGrid`].
//!
//! Transform convention: `coeffs(ξ) = N^{-n} Σ_x f(x) e^{-iξ·x}`, so the inverse
//! is the plain sum `f(x) = Σ_ξ coeffs(ξ) e^{iξ·x}` and Parseval reads
//! `Σ_ξ |coeffs(ξ)|² = N^{-n} Σ_x |f(x)|²`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{MkgError, Result};
use crate::fft;
use crate::grid::{TorusGrid, Wavevector};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    is_real: bool,
}

/// Values of a field at the lattice points `x = h·(i_1, …, i_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

/// Direction of [`transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Either side of a transform.
#[derive(Debug, Clone, PartialEq)]
pub enum Transformed {
    Spectral(SpectralScalar),
    Points(PointField),
}

/// Forward (points to coefficients) or inverse transform of raw lattice values.
pub fn transform(
    grid: &TorusGrid,
    values: &[Complex64],
    direction: Direction,
) -> Result<Transformed> {
    match direction {
        Direction::Forward => {
            let p = PointField::from_values(*grid, values.to_vec())?;
            Ok(Transformed::Spectral(p.forward()))
        }
        Direction::Inverse => {
            let s = SpectralScalar::from_coeffs(*grid, values.to_vec(), false)?;
            Ok(Transformed::Points(s.to_points()))
        }
    }
}

fn check_values(grid: &TorusGrid, v: &[Complex64], what: &'static str) -> Result<()> {
    if v.len() != grid.len() {
        return Err(MkgError::DimensionMismatch {
            expected: grid.len(),
            got: v.len(),
        });
    }
    if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(MkgError::NonFinite(what));
    }
    Ok(())
}

fn shape(grid: &TorusGrid) -> Vec<usize> {
    vec![grid.size(); grid.dim()]
}

impl SpectralScalar {
    pub fn zeros(grid: TorusGrid, is_real: bool) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
            is_real,
        }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>, is_real: bool) -> Result<Self> {
        check_values(&grid, &coeffs, "spectral coefficients")?;
        Ok(Self {
            grid,
            coeffs,
            is_real,
        })
    }

    /// Field `amp · e^{i k·x}`.
    pub fn single_mode(grid: TorusGrid, k: &[i64], amp: Complex64) -> Self {
        let mut f = Self::zeros(grid, false);
        f.coeffs[grid.flat_index(k)] = amp;
        f
    }

    /// Real field `amp · cos(k·x)`.
    pub fn cosine_mode(grid: TorusGrid, k: &[i64], amp: f64) -> Self {
        let mut f = Self::zeros(grid, true);
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        f.coeffs[grid.flat_index(k)] += Complex64::new(amp / 2.0, 0.0);
        f.coeffs[grid.flat_index(&neg)] += Complex64::new(amp / 2.0, 0.0);
        f
    }

    pub fn constant(grid: TorusGrid, c: Complex64) -> Self {
        let mut f = Self::zeros(grid, c.im == 0.0);
        f.coeffs[0] = c;
        f
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn with_real_flag(mut self, is_real: bool) -> Self {
        self.is_real = is_real;
        self
    }

    /// Coefficient of an integer wavevector.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.grid.flat_index(k)]
    }

    /// Lattice mean, i.e. the zero-frequency coefficient.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Normalized L² norm `(Σ_ξ |coeffs|²)^{1/2} = (N^{-n} Σ_x |f|²)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `Σ_ξ conj(self) · other`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(MkgError::GridMismatch)
        }
    }

    /// Relative violation of `coeffs(-ξ) = conj(coeffs(ξ))`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.norm_l2().max(f64::MIN_POSITIVE);
        let table = self.grid.mode_table();
        let worst = table
            .neg
            .iter()
            .enumerate()
            .map(|(flat, &neg)| (self.coeffs[flat] - self.coeffs[neg].conj()).norm())
            .fold(0.0, f64::max);
        worst / scale
    }

    /// Project onto Hermitian-symmetric coefficients and mark the field real.
    pub fn make_real(mut self) -> Self {
        let src = self.coeffs.clone();
        let table = self.grid.mode_table();
        for (flat, &neg) in table.neg.iter().enumerate() {
            self.coeffs[flat] = 0.5 * (src[flat] + src[neg].conj());
        }
        self.is_real = true;
        self
    }

    /// Coefficients of the pointwise complex conjugate field.
    pub fn conj(&self) -> Self {
        let table = self.grid.mode_table();
        let coeffs = table.neg.iter().map(|&neg| self.coeffs[neg].conj()).collect();
        Self {
            grid: self.grid,
            coeffs,
            is_real: self.is_real,
        }
    }

    /// Per-frequency multiplication by `symbol(ξ)`.
    pub fn map_symbol(&self, symbol: impl Fn(&Wavevector) -> Complex64) -> Self {
        let mut out = self.clone();
        for (flat, k) in self.grid.modes() {
            out.coeffs[flat] *= symbol(&k);
        }
        out
    }

    /// Real-symbol variant of [`map_symbol`](Self::map_symbol).
    pub fn map_real_symbol(&self, symbol: impl Fn(&Wavevector) -> f64) -> Self {
        let mut out = self.clone();
        for (flat, k) in self.grid.modes() {
            out.coeffs[flat] *= symbol(&k);
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= c);
        out.is_real = self.is_real && c.im == 0.0;
        out
    }

    pub fn scaled_real(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self += a · x`.
    pub fn axpy(&mut self, a: Complex64, x: &Self) {
        debug_assert_eq!(self.grid, x.grid);
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * v;
        }
        self.is_real = self.is_real && x.is_real && a.im == 0.0;
    }

    pub fn to_points(&self) -> PointField {
        let mut values = self.coeffs.clone();
        fft::transform_nd(&mut values, &shape(&self.grid), true);
        PointField {
            grid: self.grid,
            values,
        }
    }
}

impl PointField {
    pub fn from_values(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        check_values(&grid, &values, "point values")?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.point(i)[..grid.dim()]))
            .collect();
        Self { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Forward transform; the result is flagged complex.
    pub fn forward(&self) -> SpectralScalar {
        let mut coeffs = self.values.clone();
        fft::transform_nd(&mut coeffs, &shape(&self.grid), false);
        let inv = 1.0 / self.grid.len() as f64;
        coeffs.iter_mut().for_each(|c| *c *= inv);
        SpectralScalar {
            grid: self.grid,
            coeffs,
            is_real: false,
        }
    }

    /// Forward transform of the real part, returned as an exactly Hermitian field.
    pub fn forward_real(&self) -> SpectralScalar {
        let real = PointField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(v.re, 0.0))
                .collect(),
        };
        real.forward().make_real()
    }

    /// Pointwise combination of two lattices.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&a| f(a)).collect(),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&SpectralScalar> for &SpectralScalar {
            type Output = SpectralScalar;
            fn $method(self, rhs: &SpectralScalar) -> SpectralScalar {
                assert_eq!(self.grid, rhs.grid, "grid mismatch");
                SpectralScalar {
                    grid: self.grid,
                    coeffs: self
                        .coeffs
                        .iter()
                        .zip(&rhs.coeffs)
                        .map(|(a, b)| a $op b)
                        .collect(),
                    is_real: self.is_real && rhs.is_real,
                }
            }
        }
        impl $tr<SpectralScalar> for SpectralScalar {
            type Output = SpectralScalar;
            fn $method(self, rhs: SpectralScalar) -> SpectralScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&SpectralScalar> for SpectralScalar {
            type Output = SpectralScalar;
            fn $method(self, rhs: &SpectralScalar) -> SpectralScalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl AddAssign<&SpectralScalar> for SpectralScalar {
    fn add_assign(&mut self, rhs: &SpectralScalar) {
        self.axpy(Complex64::new(1.0, 0.0), rhs);
    }
}

impl SubAssign<&SpectralScalar> for SpectralScalar {
    fn sub_assign(&mut self, rhs: &SpectralScalar) {
        self.axpy(Complex64::new(-1.0, 0.0), rhs);
    }
}

impl Neg for &SpectralScalar {
    type Output = SpectralScalar;
    fn neg(self) -> SpectralScalar {
        self.scaled_real(-1.0)
    }
}

impl Neg for SpectralScalar {
    type Output = SpectralScalar;
    fn neg(self) -> SpectralScalar {
        self.scaled_real(-1.0)
    }
}

impl Mul<f64> for &SpectralScalar {
    type Output = SpectralScalar;
    fn mul(self, rhs: f64) -> SpectralScalar {
        self.scaled_real(rhs)
    }
}

impl Mul<f64> for SpectralScalar {
    type Output = SpectralScalar;
    fn mul(self, rhs: f64) -> SpectralScalar {
        self.scaled_real(rhs)
    }
}

impl Mul<Complex64> for &SpectralScalar {
    type Output = SpectralScalar;
    fn mul(self, rhs: Complex64) -> SpectralScalar {
        self.scaled(rhs)
    }
}
