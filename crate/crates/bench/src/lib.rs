//! Shared inputs for the benchmarks.

use mkg_core::multiplier::divergence;
use mkg_core::random::random_field;
use mkg_core::{build_data, BuildOptions, FaradaySeed, InitialData, MkgState, TorusGrid};
use num_complex::Complex64;

/// Random state with mean-free potentials and `∂ₜA_0 = ∂^jA_j`.
pub fn lorenz_state(g: TorusGrid, seed: u64) -> MkgState {
    let mut st = MkgState::zeros(g, 1.0);
    st.phi = random_field(g, seed, false, 3.0);
    st.phi_t = random_field(g, seed + 1, false, 3.0);
    for mu in 0..=g.dim() {
        let mut a = random_field(g, seed + 10 + mu as u64, true, 3.0);
        a.coeffs_mut()[0] = Complex64::default();
        st.a[mu] = a;
        st.a_t[mu] = random_field(g, seed + 20 + mu as u64, true, 3.0);
    }
    st.a_t[0] = divergence(&st.a[1..]);
    st
}

pub fn smooth_data(g: TorusGrid) -> InitialData {
    let phi0 = random_field(g, 1, false, 2.0);
    let phi1 = random_field(g, 2, false, 2.0);
    let opts = BuildOptions { width: 2.0, electric: Some((3, 0.5)), ..Default::default() };
    build_data(&phi0, &phi1, &FaradaySeed::Random { seed: 4, amplitude: 0.5 }, &opts).expect("valid data")
}
