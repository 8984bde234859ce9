//! Windowed free waves `u(t, x) = w(t) Σ a_ξ e^{i(σ|ξ|t + ξ·x)}` and the test ensembles.
//!
//! Waves are kept as mode lists. Norms are evaluated from per-mode temporal
//! spectra `W_{σ,|ξ|}(τ)` of `w(t) e^{iσ|ξ|t}`, cached by `(|ξ|², σ)`, so the
//! full space-time array is never needed for the right-hand sides of a probe.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result, Warning};
use crate::fft;
use crate::grid::TorusGrid;
use crate::multiplier::MEAN_DROP_THRESHOLD;
use crate::random::{gaussian, stream_rng};
use crate::spectral::SpectralScalar;

use super::spacetime::{check_nt, japanese, tau_of, time_points, SpaceTimeField, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveMode {
    pub k: Vec<i64>,
    pub amp: Complex64,
    /// `+1` or `-1`: the wave travels on `τ = σ|ξ|`.
    pub sign: i8,
}

impl WaveMode {
    pub fn norm_sqr(&self) -> i64 {
        self.k.iter().map(|v| v * v).sum()
    }

    pub fn omega(&self) -> f64 {
        (self.norm_sqr() as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeWave {
    grid: TorusGrid,
    modes: Vec<WaveMode>,
    window: Window,
}

impl FreeWave {
    pub fn new(grid: TorusGrid, window: Window) -> Self {
        Self {
            grid,
            modes: Vec::new(),
            window,
        }
    }

    /// Adds a mode; components must satisfy `|k_i| < N/2`.
    pub fn push(&mut self, k: &[i64], amp: Complex64, sign: i8) -> Result<()> {
        if k.len() != self.grid.dim() {
            return Err(MkgError::DimensionMismatch {
                expected: self.grid.dim(),
                got: k.len(),
            });
        }
        let half = (self.grid.size() / 2) as i64;
        if k.iter().any(|v| v.abs() >= half) {
            return Err(MkgError::InvalidProbe(format!("mode {k:?} outside |k_i| < {half}")));
        }
        if sign != 1 && sign != -1 {
            return Err(MkgError::InvalidProbe(format!("sign must be ±1, got {sign}")));
        }
        if !(amp.re.is_finite() && amp.im.is_finite()) {
            return Err(MkgError::NonFinite("wave amplitude"));
        }
        self.modes.push(WaveMode {
            k: k.to_vec(),
            amp,
            sign,
        });
        Ok(())
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn modes(&self) -> &[WaveMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            m.amp *= c;
        }
        out
    }

    pub(crate) fn flat(&self, m: &WaveMode) -> usize {
        self.grid.flat_index(&m.k)
    }

    /// `a e^{iσ|ξ|t}` for every mode.
    pub(crate) fn phases(&self, t: f64) -> Vec<Complex64> {
        self.modes
            .iter()
            .map(|m| m.amp * Complex64::from_polar(1.0, m.sign as f64 * m.omega() * t))
            .collect()
    }

    /// Spatial coefficients of the unwindowed wave at time `t`.
    pub fn free_coeffs(&self, t: f64) -> SpectralScalar {
        let mut out = SpectralScalar::zeros(self.grid, false);
        for (m, z) in self.modes.iter().zip(self.phases(t)) {
            out.coeffs_mut()[self.flat(m)] += z;
        }
        out
    }

    /// Spatial coefficients of `u(t, ·)`, window included.
    pub fn coeffs_at(&self, t: f64) -> SpectralScalar {
        self.free_coeffs(t).scaled_real(self.window.weight(t))
    }

    /// Windowed point values at time `t`.
    pub fn points_at(&self, t: f64) -> Vec<Complex64> {
        let n = self.grid.size();
        let mut support = vec![vec![false; n]; self.grid.dim()];
        for m in &self.modes {
            for (axis, &k) in support.iter_mut().zip(&m.k) {
                axis[self.grid.index_of_freq(k)] = true;
            }
        }
        let mut values = self.coeffs_at(t).coeffs().to_vec();
        fft::transform_nd_pruned(&mut values, &vec![n; self.grid.dim()], true, Some(&support));
        values
    }

    /// `∂_μ` of the unwindowed wave at time `t`; `μ = 0` is the time derivative.
    pub fn free_derivative(&self, t: f64, mu: usize) -> SpectralScalar {
        let mut out = SpectralScalar::zeros(self.grid, false);
        for (m, z) in self.modes.iter().zip(self.phases(t)) {
            let factor = if mu == 0 {
                m.sign as f64 * m.omega()
            } else {
                m.k[mu - 1] as f64
            };
            out.coeffs_mut()[self.flat(m)] += Complex64::new(0.0, factor) * z;
        }
        out
    }

    /// Space-time coefficients on `N_t` temporal points.
    pub fn materialize(&self, nt: usize) -> Result<SpaceTimeField> {
        let mut field = SpaceTimeField::zeros(self.grid, nt, self.window)?;
        let mut weights = TemporalWeights::new(nt, self.window);
        let len = self.grid.len();
        let c = field.coeffs_mut();
        for m in &self.modes {
            let flat = self.flat(m);
            let w = weights.get(m);
            for (it, wv) in w.iter().enumerate() {
                c[it * len + flat] += m.amp * wv;
            }
        }
        Ok(field)
    }

    /// Per-`ξ` temporal spectra `Σ a W_{σ,|ξ|}(τ)`, visited once per occupied `ξ`.
    fn for_each_spectrum(&self, nt: usize, mut f: impl FnMut(i64, &[Complex64])) {
        let mut weights = TemporalWeights::new(nt, self.window);
        let mut order: Vec<usize> = (0..self.modes.len()).collect();
        order.sort_by_key(|&i| self.flat(&self.modes[i]));
        let mut buf = vec![Complex64::default(); nt];
        let mut i = 0;
        while i < order.len() {
            let flat = self.flat(&self.modes[order[i]]);
            buf.iter_mut().for_each(|v| *v = Complex64::default());
            let k2 = self.modes[order[i]].norm_sqr();
            while i < order.len() && self.flat(&self.modes[order[i]]) == flat {
                let m = &self.modes[order[i]];
                for (b, w) in buf.iter_mut().zip(weights.get(m)) {
                    *b += m.amp * w;
                }
                i += 1;
            }
            f(k2, &buf);
        }
    }

    /// `‖u‖_{H^{s,b}}` without forming the space-time array.
    pub fn hsb_norm(&self, nt: usize, s: f64, b: f64) -> Result<f64> {
        check_nt(nt)?;
        let mut acc = 0.0;
        self.for_each_spectrum(nt, |k2, spec| {
            acc += (1.0 + k2 as f64).powf(s) * temporal_sum(spec, nt, k2, b);
        });
        Ok(acc.sqrt())
    }

    /// `‖u‖_{Ḣ^{s,b}}`; modes at `ξ = 0` are excluded and reported.
    pub fn hsb_norm_homogeneous(&self, nt: usize, s: f64, b: f64) -> Result<(f64, Vec<Warning>)> {
        check_nt(nt)?;
        let (mut acc, mut dropped, mut total) = (0.0, 0.0, 0.0);
        self.for_each_spectrum(nt, |k2, spec| {
            let l2 = temporal_sum(spec, nt, k2, 0.0);
            total += l2;
            if k2 == 0 {
                dropped += l2;
            } else {
                acc += (k2 as f64).powf(s) * temporal_sum(spec, nt, k2, b);
            }
        });
        let mut warnings = Vec::new();
        if total > 0.0 && dropped.sqrt() > MEAN_DROP_THRESHOLD * total.sqrt() {
            warnings.push(Warning::MeanDropped {
                magnitude: dropped.sqrt(),
            });
        }
        Ok((acc.sqrt(), warnings))
    }

    /// Rescaled so that `hsb_norm(nt, s, b) = 1`; an empty or zero wave is returned unchanged.
    pub fn normalized(&self, nt: usize, s: f64, b: f64) -> Result<Self> {
        let n = self.hsb_norm(nt, s, b)?;
        Ok(if n > 0.0 {
            self.scaled(Complex64::new(1.0 / n, 0.0))
        } else {
            self.clone()
        })
    }
}

fn temporal_sum(spec: &[Complex64], nt: usize, k2: i64, b: f64) -> f64 {
    let omega = (k2 as f64).sqrt();
    spec.iter()
        .enumerate()
        .map(|(it, c)| {
            let tau = tau_of(it, nt).abs() as f64;
            let w = if b == 0.0 {
                1.0
            } else {
                japanese(tau - omega).powf(2.0 * b)
            };
            w * c.norm_sqr()
        })
        .sum()
}

/// Cache of `W_{σ,ω}(τ) = N_t^{-1} Σ_j w(t_j) e^{iσωt_j} e^{-iτt_j}`.
pub(crate) struct TemporalWeights {
    nt: usize,
    window: Window,
    times: Vec<f64>,
    cache: HashMap<(i64, i8), Vec<Complex64>>,
}

impl TemporalWeights {
    pub fn new(nt: usize, window: Window) -> Self {
        Self {
            nt,
            window,
            times: time_points(nt),
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, m: &WaveMode) -> &[Complex64] {
        let (nt, window, times) = (self.nt, self.window, &self.times);
        self.cache.entry((m.norm_sqr(), m.sign)).or_insert_with(|| {
            let omega = m.sign as f64 * m.omega();
            let mut v: Vec<Complex64> = times
                .iter()
                .map(|&t| Complex64::from_polar(window.weight(t), omega * t))
                .collect();
            fft::transform_1d(&mut v, false);
            let scale = 1.0 / nt as f64;
            v.iter_mut().for_each(|c| *c *= scale);
            v
        })
    }
}

/// A single mode of unit amplitude.
pub fn single_mode(grid: TorusGrid, k: &[i64], sign: i8, window: Window) -> Result<FreeWave> {
    let mut w = FreeWave::new(grid, window);
    w.push(k, Complex64::new(1.0, 0.0), sign)?;
    Ok(w)
}

/// Largest admissible `|ξ_i|` for ensemble modes, keeping products alias-free.
pub fn ensemble_radius(grid: &TorusGrid) -> i64 {
    (grid.size() / 4) as i64 - 1
}

fn box_modes(grid: &TorusGrid, mut f: impl FnMut(&[i64])) {
    let n = grid.dim();
    let r = ensemble_radius(grid);
    if r < 0 {
        return;
    }
    let side = (2 * r + 1) as usize;
    let mut k = vec![0i64; n];
    for idx in 0..side.pow(n as u32) {
        let mut rem = idx;
        for c in k.iter_mut().rev() {
            *c = (rem % side) as i64 - r;
            rem /= side;
        }
        f(&k);
    }
}

/// Default extra decay `δ` of [`random_free`] amplitudes.
pub const RANDOM_FREE_DECAY: f64 = 2.0;

/// Dense random free wave on every `ξ ≠ 0` with `|ξ_i| < N/4`.
///
/// Amplitudes are complex Gaussians times `⟨ξ⟩^{-(s + n/2 + δ)}`, so the `H^s`
/// energy of the dyadic shell `|ξ| ~ R` scales like `R^{-2δ}`; signs are random.
pub fn random_free(grid: TorusGrid, seed: u64, stream: u64, s: f64, delta: f64, window: Window) -> FreeWave {
    let mut rng = stream_rng(seed, stream);
    let decay = s + grid.dim() as f64 / 2.0 + delta;
    let mut w = FreeWave::new(grid, window);
    box_modes(&grid, |k| {
        if k.iter().all(|&v| v == 0) {
            return;
        }
        let k2: i64 = k.iter().map(|v| v * v).sum();
        let amp = gaussian(&mut rng) * (1.0 + k2 as f64).powf(-decay / 2.0);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        w.modes.push(WaveMode {
            k: k.to_vec(),
            amp,
            sign,
        });
    });
    w
}

/// Knapp-type wave at scale `λ`: modes with `ξ·d ∈ [λ/2, λ]` and transverse
/// extent `|ξ - (ξ·d)d| ≤ thickness`, all on the sheet `τ = sign·|ξ|` with one
/// common phase and amplitudes jittered by ±5 %.
#[allow(clippy::too_many_arguments)]
pub fn knapp(
    grid: TorusGrid,
    seed: u64,
    stream: u64,
    lambda: f64,
    direction: &[f64],
    thickness: f64,
    sign: i8,
    window: Window,
) -> Result<FreeWave> {
    if direction.len() != grid.dim() {
        return Err(MkgError::DimensionMismatch {
            expected: grid.dim(),
            got: direction.len(),
        });
    }
    let dn = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(dn.is_finite() && dn > 0.0) {
        return Err(MkgError::InvalidProbe("knapp direction must be nonzero".into()));
    }
    let d: Vec<f64> = direction.iter().map(|v| v / dn).collect();
    let mut rng = stream_rng(seed, stream);
    let mut w = FreeWave::new(grid, window);
    box_modes(&grid, |k| {
        let p: f64 = k.iter().zip(&d).map(|(a, b)| *a as f64 * b).sum();
        if !(p >= 0.5 * lambda && p <= lambda) {
            return;
        }
        let perp2: f64 = k
            .iter()
            .zip(&d)
            .map(|(a, b)| (*a as f64 - p * b).powi(2))
            .sum();
        if perp2 > thickness * thickness + 1e-9 {
            return;
        }
        let amp = 1.0 + 0.1 * (rng.gen::<f64>() - 0.5);
        w.modes.push(WaveMode {
            k: k.to_vec(),
            amp: Complex64::new(amp, 0.0),
            sign,
        });
    });
    Ok(w)
}

/// Dyadic scales `2, 4, …, N/4` used by the Knapp ensemble (at least `{2}`).
pub fn knapp_scales(grid: &TorusGrid) -> Vec<f64> {
    let mut out = vec![2.0];
    let top = (grid.size() / 4) as f64;
    while out.last().copied().unwrap_or(2.0) * 2.0 <= top {
        let next = out.last().unwrap() * 2.0;
        out.push(next);
    }
    out
}
