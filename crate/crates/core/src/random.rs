//! Seeded random fields.
//!
//! Every generator draws from a ChaCha stream selected by `(seed, stream)`, so
//! results do not depend on call order elsewhere in a program.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::TorusGrid;
use crate::spectral::SpectralScalar;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Random field with Gaussian spectral envelope `exp(-|ξ|²/(2 width²))`,
/// supported inside the dealiasing cutoff and normalized to unit L² norm.
pub fn random_field(grid: TorusGrid, seed: u64, is_real: bool, width: f64) -> SpectralScalar {
    random_with_envelope(grid, seed, is_real, |k2| (-k2 / (2.0 * width * width)).exp())
}

/// Random field with algebraic envelope `⟨ξ⟩^{-decay}` inside the dealiasing cutoff,
/// normalized to unit L² norm.
pub fn random_field_power(grid: TorusGrid, seed: u64, is_real: bool, decay: f64) -> SpectralScalar {
    random_with_envelope(grid, seed, is_real, |k2| (1.0 + k2).powf(-decay / 2.0))
}

/// Random field supported on every mode of the lattice (Nyquist included), unit L² norm.
pub fn random_full_band(grid: TorusGrid, seed: u64, is_real: bool) -> SpectralScalar {
    let mut rng = stream_rng(seed, 0);
    let coeffs = (0..grid.len()).map(|_| gaussian(&mut rng)).collect();
    let f = SpectralScalar::from_coeffs(grid, coeffs, false).expect("finite");
    let f = if is_real { f.make_real() } else { f };
    let n = f.norm_l2();
    f.scaled_real(1.0 / n)
}

fn random_with_envelope(
    grid: TorusGrid,
    seed: u64,
    is_real: bool,
    envelope: impl Fn(f64) -> f64,
) -> SpectralScalar {
    let mut rng = stream_rng(seed, 0);
    let cutoff = grid.dealias_cutoff();
    let mut f = SpectralScalar::zeros(grid, false);
    for (flat, k) in grid.modes() {
        let z = gaussian(&mut rng);
        if k.max_abs() <= cutoff {
            f.coeffs_mut()[flat] = z * envelope(k.norm_sqr());
        }
    }
    let f = if is_real { f.make_real() } else { f };
    let n = f.norm_l2();
    if n > 0.0 {
        f.scaled_real(1.0 / n)
    } else {
        f
    }
}
