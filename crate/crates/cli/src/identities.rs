//! `mkg check-identities`: algebraic identities on random data.

use mkg_core::dynamics::{current, rhs_m, rhs_mtilde, rhs_n};
use mkg_core::fields::faraday_from_potential;
use mkg_core::multiplier::divergence;
use mkg_core::nullforms::{decompose_interaction_with_sign, helmholtz_split};
use mkg_core::random::random_field;
use mkg_core::{build_data, BuildOptions, FaradaySeed, MkgState, TorusGrid};
use num_complex::Complex64;

use crate::error::{CliError, EXIT_IDENTITY};

pub const TOLERANCE: f64 = 1e-9;

/// Random state with mean-free potentials satisfying `∂ₜA_0 = ∂^jA_j`.
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

fn relative(gap: f64, scale: f64) -> f64 {
    gap / scale.max(f64::MIN_POSITIVE)
}

/// `(name, residual)` for every identity.
pub fn residuals(dim: usize, size: usize, seed: u64, riesz_sign: f64) -> Result<Vec<(&'static str, f64)>, CliError> {
    let g = TorusGrid::new(dim, size)?;
    let st = lorenz_state(g, seed);
    let mut out = Vec::new();

    out.push(("decompose_interaction", decompose_interaction_with_sign(&st, riesz_sign).relative_mismatch()));

    let (j, n) = (current(&st), rhs_n(&st));
    let nj = (0..=dim)
        .map(|mu| relative((&n[mu] + &j[mu]).norm_l2(), j[mu].norm_l2()))
        .fold(0.0, f64::max);
    out.push(("rhs_n_equals_minus_current", nj));

    let m = rhs_m(&st);
    out.push(("rhs_m_equals_rhs_mtilde", relative((&m - &rhs_mtilde(&st)).norm_l2(), m.norm_l2())));

    let split = helmholtz_split(&st.a[1..]);
    let mut recombined: f64 = 0.0;
    for k in 0..dim {
        let mut sum = &split.df[k] + &split.cf[k];
        sum.coeffs_mut()[0] += split.mean[k];
        recombined = recombined.max(relative((&sum - &st.a[k + 1]).norm_l2(), st.a[k + 1].norm_l2()));
    }
    out.push(("helmholtz_recombination", recombined));

    out.push(("bianchi", faraday_from_potential(&st).bianchi_residual()));

    let opts = BuildOptions { width: 3.0, electric: Some((seed + 40, 0.5)), ..Default::default() };
    let data = build_data(&st.phi, &st.phi_t, &FaradaySeed::Random { seed: seed + 41, amplitude: 0.5 }, &opts)?;
    out.push(("constraint_construction", data.max_residual()));
    Ok(out)
}

pub fn cmd_check_identities(dim: usize, size: usize, seed: u64, flip_riesz: bool) -> Result<(), CliError> {
    let rows = residuals(dim, size, seed, if flip_riesz { -1.0 } else { 1.0 })?;
    println!("identity checks on n = {dim}, N = {size}, seed = {seed} (tolerance {TOLERANCE:.0e})");
    println!("{:<30} {:>12}  status", "identity", "residual");
    let mut failed = Vec::new();
    for (name, r) in &rows {
        let ok = *r <= TOLERANCE;
        println!("{name:<30} {r:>12.3e}  {}", if ok { "ok" } else { "FAIL" });
        if !ok {
            failed.push(format!("{name} (residual {r:.3e})"));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(EXIT_IDENTITY, format!("identity check failed: {}", failed.join(", "))))
    }
}
