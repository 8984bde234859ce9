mod common;

use common::random_state;
use mkg_core::diagnostics::charge;
use mkg_core::dynamics::{current, faraday_sources, rhs_m, rhs_mtilde, rhs_n, SchemeKind, Stepper, WaveState};
use mkg_core::estlab::{
    knapp, random_free, sides, single_mode, tau_of, Ensemble, Estimate, FreeWave, ProbeConfig, Resolution, Window,
};
use mkg_core::fields::{faraday_from_potential, sobolev_norm};
use mkg_core::initdata::{build_data, curl_faraday, BuildOptions, FaradaySeed};
use mkg_core::multiplier::{d_power, dealias, derivative, divergence, lambda_power, riesz};
use mkg_core::nullforms::{decompose_interaction, helmholtz_split, null_form, FieldWithTimeDeriv};
use mkg_core::random::{random_field, random_full_band};
use mkg_core::snapshot::{read_snapshot, write_snapshot};
use mkg_core::{apply_multiplier, probe, MkgState, MultiplierSymbol, SpectralScalar, TorusGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: &SpectralScalar, b: &SpectralScalar) -> f64 {
    (a - b).norm_l2() / b.norm_l2().max(a.norm_l2()).max(1e-300)
}

fn mean_free(mut f: SpectralScalar) -> SpectralScalar {
    f.coeffs_mut()[0] = Complex64::default();
    f
}

fn grid_strategy() -> impl Strategy<Value = TorusGrid> {
    prop_oneof![
        (1usize..=3, prop_oneof![Just(8usize), Just(16)]).prop_map(|(d, n)| TorusGrid::new(d, n).unwrap()),
        Just(TorusGrid::new(4, 8).unwrap()),
    ]
}

/// Random state with mean-free potentials and `∂ₜA_0 = ∂^jA_j`.
fn lorenz_state(g: TorusGrid, seed: u64) -> MkgState {
    let mut st = random_state(g, seed, 1.0);
    for a in &mut st.a {
        a.coeffs_mut()[0] = Complex64::default();
    }
    st.a_t[0] = divergence(&st.a[1..]);
    st
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval(g in grid_strategy(), seed in 0u64..1000) {
        let f = random_full_band(g, seed, false);
        let pts = f.to_points();
        let mean_sq = pts.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.len() as f64;
        prop_assert!((f.norm_l2().powi(2) - mean_sq).abs() <= 1e-12 * mean_sq);
        prop_assert!(rel(&pts.forward(), &f) <= 1e-12);
    }

    #[test]
    fn multipliers_compose(g in grid_strategy(), seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = random_full_band(g, seed, false);
        prop_assert!(rel(&lambda_power(&lambda_power(&f, a), b), &lambda_power(&f, a + b)) <= 1e-12);
        let f0 = mean_free(f);
        prop_assert!(rel(&d_power(&d_power(&f0, a), b), &d_power(&f0, a + b)) <= 1e-12);
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity(g in grid_strategy(), seed in 0u64..1000) {
        let f = mean_free(random_full_band(g, seed, true));
        let mut acc = SpectralScalar::zeros(g, true);
        for k in 0..g.dim() {
            acc += &riesz(&riesz(&f, k), k);
        }
        prop_assert!(rel(&acc, &(-&f)) <= 1e-12);
    }

    #[test]
    fn multipliers_are_linear(
        g in grid_strategy(),
        seed in 0u64..1000,
        a in (-3.0f64..3.0, -3.0f64..3.0),
        b in (-3.0f64..3.0, -3.0f64..3.0),
        alpha in -1.5f64..1.5,
    ) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let f = random_full_band(g, seed, false);
        let h = random_full_band(g, seed + 1, false);
        let combo = &f.scaled(a) + &h.scaled(b);
        let symbols = [
            MultiplierSymbol::lambda(alpha),
            MultiplierSymbol::d(alpha),
            MultiplierSymbol::riesz(0),
            MultiplierSymbol::inverse_laplacian(),
        ];
        for m in symbols {
            let op = |x: &SpectralScalar| apply_multiplier(x, &m).unwrap().0;
            let want = &op(&f).scaled(a) + &op(&h).scaled(b);
            prop_assert!(rel(&op(&combo), &want) <= 1e-12, "{m:?}");
        }
    }

    #[test]
    fn sobolev_norm_basics(g in grid_strategy(), seed in 0u64..1000, s in -2.0f64..2.0, ds in 0.01f64..1.0) {
        let f = random_full_band(g, seed, false);
        prop_assert!((sobolev_norm(&f, 0.0) - f.norm_l2()).abs() <= 1e-12 * f.norm_l2());
        prop_assert!(sobolev_norm(&f, s + ds) >= sobolev_norm(&f, s));
    }

    #[test]
    fn faraday_is_gauge_invariant(g in grid_strategy(), seed in 0u64..1000) {
        let st = random_state(g, seed, 1.0);
        let chi = random_field(g, seed + 99, true, 3.0);
        let mut shifted = st.clone();
        for j in 1..=g.dim() {
            shifted.a[j] += &derivative(&chi, j - 1);
        }
        let (f, h) = (faraday_from_potential(&st), faraday_from_potential(&shifted));
        prop_assert!(f.distance(&h) <= 1e-12 * f.norm_l2().max(1.0));
    }

    #[test]
    fn snapshot_round_trip(g in grid_strategy(), seed in 0u64..1000, mass in 0.0f64..3.0, t in 0.0f64..5.0) {
        let mut st = random_state(g, seed, mass);
        st.t = t;
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &st).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        prop_assert_eq!(back, st);
    }

    #[test]
    fn built_data_satisfies_constraints(g in grid_strategy(), seed in 0u64..1000, electric in any::<bool>()) {
        let phi0 = random_field(g, seed, false, 2.0);
        let phi1 = random_field(g, seed + 1, false, 2.0);
        let opts = BuildOptions { electric: electric.then_some((seed + 2, 0.7)), ..Default::default() };
        let data = build_data(&phi0, &phi1, &FaradaySeed::Random { seed: seed + 3, amplitude: 0.8 }, &opts).unwrap();
        for (k, v) in &data.residuals {
            prop_assert!(*v <= 1e-12, "{k} = {v:e}");
        }
        // mean of Im(φ₀ conj φ₁) on the retained band, as a plain coefficient sum
        let (p0, p1) = (dealias(&phi0), dealias(&phi1));
        let want: f64 = p0.coeffs().iter().zip(p1.coeffs()).map(|(a, b)| (a * b.conj()).im).sum();
        prop_assert!((data.dropped_charge - want).abs() <= 1e-14 * p0.norm_l2() * p1.norm_l2() + 1e-300);
    }

    #[test]
    fn magnetic_part_is_linear_in_the_seed_curl(seed in 0u64..1000) {
        let g = TorusGrid::new(3, 8).unwrap();
        let w1: Vec<_> = (0..3).map(|j| random_field(g, seed + j, true, 2.0)).collect();
        let w2: Vec<_> = (0..3).map(|j| random_field(g, seed + 10 + j, true, 2.0)).collect();
        let w12: Vec<_> = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
        let phi = random_field(g, seed + 20, false, 2.0);
        let zero = SpectralScalar::zeros(g, false);
        let build = |w: &[SpectralScalar]| {
            build_data(&phi, &zero, &FaradaySeed::Given(curl_faraday(w)), &BuildOptions::default()).unwrap()
        };
        let (d1, d2, d12) = (build(&w1), build(&w2), build(&w12));
        for j in 1..=3 {
            let sum = &d1.a0[j] + &d2.a0[j];
            prop_assert!((&d12.a0[j] - &sum).norm_l2() <= 1e-12 * sum.norm_l2().max(1.0));
            for k in j + 1..=3 {
                let sum = d1.f0.get(j, k) + d2.f0.get(j, k);
                prop_assert!((d12.f0.get(j, k) - &sum).norm_l2() <= 1e-12 * sum.norm_l2().max(1.0));
            }
        }
    }

    #[test]
    fn null_form_symmetries(g in grid_strategy(), seed in 0u64..1000, c in -2.0f64..2.0) {
        let n = g.dim();
        let mk = |s: u64| FieldWithTimeDeriv::new(random_field(g, s, false, 2.0), random_field(g, s + 1, false, 2.0));
        let (u, v, w) = (mk(seed), mk(seed + 2), mk(seed + 4));
        let uw = FieldWithTimeDeriv::new(&u.f + &w.f.scaled_real(c), &u.f_t + &w.f_t.scaled_real(c));
        for a in 0..=n {
            for b in 0..=n {
                let q = null_form(a, b, &u, &v);
                let tol = 1e-12 * q.norm_l2().max(1.0);
                prop_assert!((&q + &null_form(b, a, &u, &v)).norm_l2() <= tol);
                prop_assert!((&q + &null_form(a, b, &v, &u)).norm_l2() <= tol);
                let lin = &q + &null_form(a, b, &w, &v).scaled_real(c);
                prop_assert!((null_form(a, b, &uw, &v) - &lin).norm_l2() <= 1e-12 * lin.norm_l2().max(1.0));
            }
        }
    }

    #[test]
    fn helmholtz_projection_is_idempotent(g in grid_strategy(), seed in 0u64..1000) {
        let a: Vec<_> = (0..g.dim()).map(|j| random_full_band(g, seed + j as u64, true)).collect();
        let split = helmholtz_split(&a);
        let again = helmholtz_split(&split.df);
        for j in 0..g.dim() {
            prop_assert!((&again.df[j] - &split.df[j]).norm_l2() <= 1e-12 * split.df[j].norm_l2().max(1.0));
            prop_assert!(again.cf[j].norm_l2() <= 1e-12);
            let sum = &split.df[j] + &split.cf[j];
            let mut rest = &a[j] - &sum;
            rest.coeffs_mut()[0] -= split.mean[j];
            prop_assert!(rest.norm_l2() <= 1e-12);
        }
        prop_assert!(divergence(&split.df).norm_l2() <= 1e-12);
    }

    #[test]
    fn identity_defect_is_linear_in_the_lorenz_violation(seed in 0u64..1000, lambda in 0.1f64..5.0) {
        let g = TorusGrid::new(2, 16).unwrap();
        let base = lorenz_state(g, seed);
        let bump = random_field(g, seed + 50, true, 2.0);
        let defect = |s: f64| {
            let mut st = base.clone();
            st.a_t[0] += &bump.scaled_real(s);
            let i = decompose_interaction(&st);
            (&(&i.p1 + &i.p2) - &i.direct).norm_l2()
        };
        let (d1, dl) = (defect(1.0), defect(lambda));
        prop_assert!(defect(0.0) <= 1e-12 * d1);
        prop_assert!((dl - lambda * d1).abs() <= 1e-8 * lambda * d1);
    }

    #[test]
    fn formulations_agree(g in grid_strategy(), seed in 0u64..1000) {
        let st = random_state(g, seed, 1.3);
        let (j, nn) = (current(&st), rhs_n(&st));
        for mu in 0..=g.dim() {
            prop_assert!((&nn[mu] + &j[mu]).norm_l2() <= 1e-12 * j[mu].norm_l2().max(1.0));
        }
        let lor = lorenz_state(g, seed);
        let m = rhs_m(&lor);
        prop_assert!((&m - &rhs_mtilde(&lor)).norm_l2() <= 1e-10 * m.norm_l2());
    }

    #[test]
    fn bilinear_sources_are_phase_invariant(g in grid_strategy(), seed in 0u64..1000, theta in 0.0f64..6.28) {
        let st = random_state(g, seed, 1.0);
        let rot = st.rotate_phase(theta);
        let (j, jr) = (current(&st), current(&rot));
        let (n, nr) = (rhs_n(&st), rhs_n(&rot));
        for mu in 0..=g.dim() {
            prop_assert!((&j[mu] - &jr[mu]).norm_l2() <= 1e-12 * j[mu].norm_l2().max(1.0));
            prop_assert!((&n[mu] - &nr[mu]).norm_l2() <= 1e-12 * n[mu].norm_l2().max(1.0));
        }
        let (f, fr) = (faraday_sources(&st), faraday_sources(&rot));
        prop_assert!(f.distance(&fr) <= 1e-12 * f.norm_l2().max(1.0));
        prop_assert!((charge(&st) - charge(&rot)).abs() <= 1e-12);
    }

    #[test]
    fn free_flow_is_reversible_and_conserves_mode_energy(
        g in grid_strategy(),
        seed in 0u64..1000,
        dt in 0.001f64..0.3,
        rk4 in any::<bool>(),
    ) {
        let kind = if rk4 { SchemeKind::Rk4 } else { SchemeKind::Gautschi };
        let u = WaveState {
            t: 0.0,
            f: vec![random_full_band(g, seed, false)],
            f_t: vec![random_full_band(g, seed + 1, false)],
        };
        let zero = |w: &WaveState| vec![SpectralScalar::zeros(g, false); w.f.len()];
        let fwd = Stepper::new(&g, kind, dt).unwrap().step(&u, zero).unwrap();
        let back = Stepper::new(&g, kind, -dt).unwrap().step(&fwd, zero).unwrap();
        prop_assert!(rel(&back.f[0], &u.f[0]) <= 1e-12 && rel(&back.f_t[0], &u.f_t[0]) <= 1e-12);
        let table = g.mode_table();
        for (flat, &k2) in table.norm_sqr.iter().enumerate() {
            if k2 == 0.0 {
                continue;
            }
            let e = |w: &WaveState| w.f[0].coeffs()[flat].norm_sqr() + w.f_t[0].coeffs()[flat].norm_sqr() / k2;
            prop_assert!((e(&fwd) - e(&u)).abs() <= 1e-12 * e(&u).max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn charge_is_gauge_covariant(seed in 0u64..1000, theta in 0.0f64..6.28) {
        // keep every lattice mode so that pointwise phase factors are exact
        let g = TorusGrid::with_dealias(2, 16, 0.5).unwrap();
        let st = random_state(g, seed, 1.0);
        let chi = random_field(g, seed + 7, true, 2.0);
        let chi_pts = chi.to_points();
        let twist = |f: &SpectralScalar| {
            f.to_points()
                .zip_with(&chi_pts, |v, c| v * Complex64::from_polar(1.0, c.re + theta))
                .forward()
        };
        let mut shifted = st.clone();
        shifted.phi = twist(&st.phi);
        shifted.phi_t = twist(&st.phi_t);
        for j in 1..=2 {
            shifted.a[j] += &derivative(&chi, j - 1);
        }
        prop_assert!((charge(&st) - charge(&shifted)).abs() <= 1e-12 * charge(&st).abs().max(1.0));
    }

    #[test]
    fn hsb_norm_is_monotone(seed in 0u64..1000, s in -1.0f64..1.5, b in -0.5f64..1.0, d in 0.01f64..0.5) {
        let g = TorusGrid::new(2, 16).unwrap();
        let u = random_free(g, seed, 0, 0.5, 1.0, Window::CosineSquared);
        let nt = 32;
        let base = u.hsb_norm(nt, s, b).unwrap();
        prop_assert!(u.hsb_norm(nt, s + d, b).unwrap() >= base);
        prop_assert!(u.hsb_norm(nt, s, b + d).unwrap() >= base);
    }

    #[test]
    fn probe_ratios_are_scale_invariant(seed in 0u64..1000, lu in 0.01f64..100.0, lv in 0.01f64..100.0) {
        let g = TorusGrid::new(3, 8).unwrap();
        let u = random_free(g, seed, 0, 0.8, 2.0, Window::CosineSquared);
        let v = random_free(g, seed, 1, 0.8, 2.0, Window::CosineSquared);
        let (su, sv) = (u.scaled(Complex64::new(lu, 0.0)), v.scaled(Complex64::new(0.0, lv)));
        let estimates = [
            Estimate::Prop36 { s0: 0.0, s1: 0.8, s2: 0.8 },
            Estimate::Strichartz { q: 4.0, r: 4.0 },
            Estimate::Lv { q: 2.0, alpha1: 0.3, alpha2: 0.3, beta0: -0.2 },
            Estimate::Nullgain { eps: 0.05 },
        ];
        for e in estimates {
            let (l, r) = sides(&e, &u, Some(&v), 16, 0.55).unwrap();
            let (ls, rs) = sides(&e, &su, Some(&sv), 16, 0.55).unwrap();
            prop_assert!(((ls / rs) / (l / r) - 1.0).abs() <= 1e-12, "{e:?}");
        }
    }
}

#[test]
fn window_factor_is_moderate_and_stable() {
    for dim in 1..=4 {
        let mut factors = Vec::new();
        for n in [8usize, 16, 32] {
            if dim == 4 && n == 32 {
                continue;
            }
            let g = TorusGrid::new(dim, n).unwrap();
            let nt = Resolution::new(n).nt;
            // the same low modes at every resolution
            let full = random_free(TorusGrid::new(dim, 8).unwrap(), 11, 0, 0.8, 2.0, Window::CosineSquared);
            let mut u = FreeWave::new(g, Window::CosineSquared);
            for m in full.modes() {
                u.push(&m.k, m.amp, m.sign).unwrap();
            }
            let on = u.hsb_norm(nt, 0.8, 0.55).unwrap();
            let off = u.clone().with_window(Window::None).hsb_norm(nt, 0.8, 0.55).unwrap();
            let f = on / off;
            assert!((0.3..=1.0).contains(&f), "n={dim} N={n}: factor {f}");
            factors.push(f);
        }
        let (lo, hi) = factors.iter().fold((f64::MAX, 0.0f64), |(a, b), &f| (a.min(f), b.max(f)));
        assert!(hi / lo <= 1.1, "n={dim}: factors {factors:?}");
    }
}

#[test]
fn single_mode_window_factor_is_exact() {
    // sin²(t/2) = ½ - ¼e^{it} - ¼e^{-it}: three temporal bins, b = 0 weights 1/4 + 2/16
    let g = TorusGrid::new(2, 8).unwrap();
    let u = single_mode(g, &[1, 0], 1, Window::CosineSquared).unwrap();
    let on = u.hsb_norm(16, 0.0, 0.0).unwrap();
    let off = u.with_window(Window::None).hsb_norm(16, 0.0, 0.0).unwrap();
    assert!((on / off - 0.375f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn knapp_spectrum_hugs_the_cone() {
    for n in [8usize, 16, 32] {
        let g = TorusGrid::new(3, n).unwrap();
        let nt = Resolution::new(n).nt;
        let lambda = (n / 4) as f64;
        let u = knapp(g, 5, 0, lambda, &[1.0, 0.0, 0.0], lambda.sqrt(), 1, Window::CosineSquared).unwrap();
        let f = u.materialize(nt).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (i, c) in f.coeffs().iter().enumerate() {
            let tau = tau_of(i / g.len(), nt) as f64;
            let d = tau.abs() - g.wavevector(i % g.len()).norm();
            num += c.norm_sqr() * d * d;
            den += c.norm_sqr();
        }
        let spread = (num / den).sqrt();
        assert!(spread <= 1.0, "N={n}: rms distance from the cone {spread} bins");
    }
}

#[test]
fn probe_is_deterministic() {
    let mut cfg = ProbeConfig::new(2, Estimate::Prop36 { s0: 0.0, s1: 0.6, s2: 0.6 }, Ensemble::random_free(), &[8, 16]);
    cfg.trials = 3;
    cfg.seed = 9;
    let a = probe(&cfg).unwrap();
    let b = probe(&cfg).unwrap();
    assert_eq!(a.to_csv_string(), b.to_csv_string());
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}
