#![allow(dead_code)]

pub mod nonlinear;

use mkg_core::random::random_field;
use mkg_core::{MkgState, SpectralScalar, TorusGrid};
use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Direct-sum Fourier analysis on `(Z/N)^n`, no FFT.
pub struct Brute {
    pub dim: usize,
    pub n: usize,
    /// Integer coordinates of every flat index, axis 0 most significant.
    pub idx: Vec<Vec<usize>>,
    /// Signed frequency of every flat index.
    pub ks: Vec<Vec<i64>>,
    roots: Vec<Complex64>,
}

impl Brute {
    pub fn new(dim: usize, n: usize) -> Self {
        let len = n.pow(dim as u32);
        let mut idx = Vec::with_capacity(len);
        let mut ks = Vec::with_capacity(len);
        for flat in 0..len {
            let mut digits = vec![0usize; dim];
            let mut rest = flat;
            for a in (0..dim).rev() {
                digits[a] = rest % n;
                rest /= n;
            }
            let k = digits
                .iter()
                .map(|&d| if d <= n / 2 { d as i64 } else { d as i64 - n as i64 })
                .collect();
            idx.push(digits);
            ks.push(k);
        }
        let roots = (0..n)
            .map(|m| Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / n as f64))
            .collect();
        Self { dim, n, idx, ks, roots }
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    fn phase(&self, k: usize, x: usize) -> usize {
        self.idx[k]
            .iter()
            .zip(&self.idx[x])
            .map(|(a, b)| a * b)
            .sum::<usize>()
            % self.n
    }

    /// `f(x) = Σ_k c_k e^{ik·x}`.
    pub fn synth(&self, c: &[Complex64]) -> Vec<Complex64> {
        let live: Vec<usize> = (0..c.len()).filter(|&k| c[k] != Complex64::default()).collect();
        (0..self.len())
            .map(|x| live.iter().map(|&k| c[k] * self.roots[self.phase(k, x)]).sum())
            .collect()
    }

    /// `c_k = N^{-n} Σ_x f(x) e^{-ik·x}`, evaluated only where `keep(k)`.
    pub fn analyze_where(&self, f: &[Complex64], keep: impl Fn(usize) -> bool) -> Vec<Complex64> {
        let scale = 1.0 / self.len() as f64;
        (0..self.len())
            .map(|k| {
                if !keep(k) {
                    return Complex64::default();
                }
                let s: Complex64 = (0..self.len())
                    .map(|x| f[x] * self.roots[(self.n - self.phase(k, x)) % self.n])
                    .sum();
                s * scale
            })
            .collect()
    }

    pub fn analyze(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.analyze_where(f, |_| true)
    }

    /// Retained by the two-thirds rule: every `|k_i| ≤ N/3`.
    pub fn kept(&self, flat: usize) -> bool {
        self.ks[flat].iter().all(|&k| (k.abs() as f64) <= self.n as f64 / 3.0)
    }

    pub fn dealias(&self, c: &[Complex64]) -> Vec<Complex64> {
        c.iter()
            .enumerate()
            .map(|(k, v)| if self.kept(k) { *v } else { Complex64::default() })
            .collect()
    }

    pub fn neg(&self, flat: usize) -> usize {
        self.idx[flat]
            .iter()
            .fold(0, |acc, &d| acc * self.n + (self.n - d) % self.n)
    }

    /// `½(c_k + conj c_{-k})`.
    pub fn hermitian(&self, c: &[Complex64]) -> Vec<Complex64> {
        (0..c.len()).map(|k| 0.5 * (c[k] + c[self.neg(k)].conj())).collect()
    }

    pub fn symbol(&self, c: &[Complex64], m: impl Fn(&[i64]) -> Complex64) -> Vec<Complex64> {
        c.iter().zip(&self.ks).map(|(v, k)| v * m(k)).collect()
    }

    pub fn deriv(&self, c: &[Complex64], axis: usize) -> Vec<Complex64> {
        self.symbol(c, |k| I * k[axis] as f64)
    }

    /// Dealiased point values of a coefficient vector.
    pub fn points(&self, c: &[Complex64]) -> Vec<Complex64> {
        self.synth(&self.dealias(c))
    }

    /// Transform a pointwise product back and dealias, optionally symmetrizing.
    pub fn finish(&self, p: &[Complex64], real: bool) -> Vec<Complex64> {
        let p: Vec<Complex64> = if real {
            p.iter().map(|v| Complex64::new(v.re, 0.0)).collect()
        } else {
            p.to_vec()
        };
        let c = self.analyze_where(&p, |k| self.kept(k));
        if real {
            self.hermitian(&c)
        } else {
            c
        }
    }
}

pub fn k2(k: &[i64]) -> f64 {
    k.iter().map(|&v| (v * v) as f64).sum()
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Complex64], s: f64) -> Vec<Complex64> {
    a.iter().map(|x| x * s).collect()
}

/// `‖a - b‖_{ℓ²} / max(1, ‖b‖_{ℓ²})`.
pub fn rel_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    d / nb.max(1.0)
}

pub fn random_state(grid: TorusGrid, seed: u64, mass: f64) -> MkgState {
    let mut st = MkgState::zeros(grid, mass);
    st.phi = random_field(grid, seed, false, 3.0);
    st.phi_t = random_field(grid, seed + 1, false, 3.0);
    for mu in 0..=grid.dim() {
        st.a[mu] = random_field(grid, seed + 10 + mu as u64, true, 3.0);
        st.a_t[mu] = random_field(grid, seed + 20 + mu as u64, true, 3.0);
    }
    st
}

pub fn coeffs(f: &SpectralScalar) -> Vec<Complex64> {
    f.coeffs().to_vec()
}
