//! Periodic lattice on the torus `T^n = (R / 2πZ)^n`.
//!
//! Every axis carries `N` points with spacing `h = 2π/N`, so the dual lattice
//! is the set of integer wavevectors `{-N/2+1, ..., N/2}^n`. Coefficient arrays
//! are stored row-major in FFT order: index `i` along an axis carries frequency
//! `i` for `i <= N/2` and `i - N` otherwise.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Upper bound on the number of lattice points of one field (`2^26`).
pub const MAX_LATTICE_POINTS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    size: usize,
    dealias_fraction: f64,
}

impl TorusGrid {
    pub const DEFAULT_DEALIAS: f64 = 1.0 / 3.0;

    pub fn new(dim: usize, size: usize) -> Result<Self> {
        Self::with_dealias(dim, size, Self::DEFAULT_DEALIAS)
    }

    pub fn with_dealias(dim: usize, size: usize, dealias_fraction: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(MkgError::InvalidGrid(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if size < 4 || !size.is_power_of_two() {
            return Err(MkgError::InvalidGrid(format!(
                "points per axis must be a power of two >= 4, got {size}"
            )));
        }
        let total = (size as u128).pow(dim as u32);
        if total > MAX_LATTICE_POINTS as u128 {
            return Err(MkgError::InvalidGrid(format!(
                "{size}^{dim} lattice points exceed the 2^26 limit"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 0.5) {
            return Err(MkgError::InvalidGrid(format!(
                "dealias fraction {dealias_fraction} outside (0, 1/2]"
            )));
        }
        Ok(Self {
            dim,
            size,
            dealias_fraction,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of lattice points (`N^n`).
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.size as f64
    }

    /// Largest retained `|ξ_i|` after dealiasing.
    pub fn dealias_cutoff(&self) -> f64 {
        self.dealias_fraction * self.size as f64
    }

    /// Frequency carried by array index `i` along one axis.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        if i <= self.size / 2 {
            i as i64
        } else {
            i as i64 - self.size as i64
        }
    }

    /// Array index along one axis for an integer frequency (taken modulo `N`).
    #[inline]
    pub fn index_of_freq(&self, k: i64) -> usize {
        k.rem_euclid(self.size as i64) as usize
    }

    /// Flat index of an integer wavevector; components are reduced modulo `N`.
    pub fn flat_index(&self, k: &[i64]) -> usize {
        debug_assert_eq!(k.len(), self.dim);
        k.iter()
            .fold(0usize, |acc, &ki| acc * self.size + self.index_of_freq(ki))
    }

    /// Wavevector stored at a flat index.
    pub fn wavevector(&self, flat: usize) -> Wavevector {
        let mut k = [0.0; MAX_DIM];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            k[axis] = self.freq(rem % self.size) as f64;
            rem /= self.size;
        }
        Wavevector { k, dim: self.dim }
    }

    /// Iterate all modes in storage order.
    pub fn modes(&self) -> Modes<'_> {
        Modes {
            grid: self,
            digits: [0; MAX_DIM],
            flat: 0,
            len: self.len(),
        }
    }

    /// Spatial coordinate of a flat point index.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        let mut rem = flat;
        let h = self.spacing();
        for axis in (0..self.dim).rev() {
            x[axis] = (rem % self.size) as f64 * h;
            rem /= self.size;
        }
        x
    }
}

/// Per-mode lookup tables of a grid, built once per thread.
#[derive(Debug)]
pub struct ModeTable {
    /// `|ξ|²`
    pub norm_sqr: Vec<f64>,
    /// Flat index of `-ξ`.
    pub neg: Vec<usize>,
    /// Mode survives dealiasing.
    pub keep: Vec<bool>,
}

thread_local! {
    static TABLES: RefCell<HashMap<(usize, usize, u64), Rc<ModeTable>>> = RefCell::new(HashMap::new());
}

impl TorusGrid {
    pub fn mode_table(&self) -> Rc<ModeTable> {
        let key = (self.dim, self.size, self.dealias_fraction.to_bits());
        TABLES.with(|t| {
            t.borrow_mut()
                .entry(key)
                .or_insert_with(|| {
                    let cutoff = self.dealias_cutoff();
                    let mut table = ModeTable {
                        norm_sqr: Vec::with_capacity(self.len()),
                        neg: Vec::with_capacity(self.len()),
                        keep: Vec::with_capacity(self.len()),
                    };
                    for (_, k) in self.modes() {
                        table.norm_sqr.push(k.norm_sqr());
                        table.keep.push(k.max_abs() <= cutoff);
                        let neg = k.components().iter().fold(0usize, |acc, &v| {
                            acc * self.size + self.index_of_freq(-(v as i64))
                        });
                        table.neg.push(neg);
                    }
                    Rc::new(table)
                })
                .clone()
        })
    }

    /// Calls `f(flat, ξ_axis)` for every mode, without building wavevectors.
    #[inline]
    pub fn for_each_axis_freq(&self, axis: usize, mut f: impl FnMut(usize, f64)) {
        let stride = self.size.pow((self.dim - 1 - axis) as u32);
        let outer = self.size.pow(axis as u32);
        let mut flat = 0;
        for _ in 0..outer {
            for d in 0..self.size {
                let k = self.freq(d) as f64;
                for _ in 0..stride {
                    f(flat, k);
                    flat += 1;
                }
            }
        }
    }
}

/// Integer wavevector stored as floats for symbol evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevector {
    pub k: [f64; MAX_DIM],
    pub dim: usize,
}

impl Wavevector {
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.k[..self.dim].iter().map(|v| v * v).sum()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨ξ⟩ = (1 + |ξ|²)^{1/2}`.
    #[inline]
    pub fn japanese(&self) -> f64 {
        (1.0 + self.norm_sqr()).sqrt()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.k[..self.dim].iter().all(|&v| v == 0.0)
    }

    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.k[..self.dim].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn components(&self) -> &[f64] {
        &self.k[..self.dim]
    }
}

pub struct Modes<'a> {
    grid: &'a TorusGrid,
    digits: [usize; MAX_DIM],
    flat: usize,
    len: usize,
}

impl Iterator for Modes<'_> {
    type Item = (usize, Wavevector);

    fn next(&mut self) -> Option<Self::Item> {
        if self.flat >= self.len {
            return None;
        }
        let dim = self.grid.dim;
        let mut k = [0.0; MAX_DIM];
        for axis in 0..dim {
            k[axis] = self.grid.freq(self.digits[axis]) as f64;
        }
        let item = (self.flat, Wavevector { k, dim });
        self.flat += 1;
        for axis in (0..dim).rev() {
            self.digits[axis] += 1;
            if self.digits[axis] < self.grid.size {
                break;
            }
            self.digits[axis] = 0;
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = self.len - self.flat;
        (rem, Some(rem))
    }
}

impl ExactSizeIterator for Modes<'_> {}
