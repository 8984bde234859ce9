//! Every multiplier, norm and pointwise nonlinearity against direct-sum and
//! pointwise-loop oracles on `N = 8` grids in every supported dimension.

mod common;

use common::nonlinear::*;
use common::*;
use mkg_core::diagnostics::{charge, gauge_residual, theorem_norm_report};
use mkg_core::dynamics::{current, faraday_sources_with_sign, rhs_m, rhs_mtilde, rhs_n};
use mkg_core::estlab::{FreeWave, SpaceTimeField, Window};
use mkg_core::fields::sobolev_norm;
use mkg_core::multiplier::{
    d_power, derivative, divergence, inv_laplacian, lambda_power, laplacian, riesz,
};
use mkg_core::nullforms::{decompose_interaction, helmholtz_split, null_form, FieldWithTimeDeriv};
use mkg_core::random::random_full_band;
use mkg_core::{
    apply_multiplier, MultiplierKind, MultiplierSymbol, SobolevExponents, SpectralScalar,
    TorusGrid,
};
use num_complex::Complex64;

const N: usize = 8;
const TOL: f64 = 1e-12;

fn grids() -> impl Iterator<Item = (TorusGrid, Brute)> {
    (1..=4).map(|d| (TorusGrid::new(d, N).unwrap(), Brute::new(d, N)))
}

/// Point values of the library result (FFT) against the oracle's direct synthesis.
fn check_points(label: &str, lib: &SpectralScalar, oracle_points: &[Complex64]) {
    let gap = rel_gap(lib.to_points().values(), oracle_points);
    assert!(gap <= TOL, "{label}: gap {gap:.3e}");
}

fn check_coeffs(label: &str, lib: &SpectralScalar, oracle: &[Complex64]) {
    let gap = rel_gap(lib.coeffs(), oracle);
    assert!(gap <= TOL, "{label}: gap {gap:.3e}");
}

fn check_value(label: &str, lib: f64, oracle: f64) {
    let gap = (lib - oracle).abs() / oracle.abs().max(1.0);
    assert!(gap <= TOL, "{label}: {lib} vs {oracle} ({gap:.3e})");
}

#[test]
fn spatial_multipliers() {
    for (g, b) in grids() {
        let d = g.dim();
        let f = random_full_band(g, 7 + d as u64, false);
        // the oracle sees the field only through its point values
        let pts = b.synth(f.coeffs());
        let fh = b.analyze(&pts);
        let through = |sym: &dyn Fn(&[i64]) -> Complex64| b.synth(&b.symbol(&fh, sym));
        let real = |x: f64| Complex64::new(x, 0.0);

        for alpha in [-1.5, 0.0, 0.5, 2.0] {
            let want = through(&|k| real((1.0 + k2(k)).powf(alpha / 2.0)));
            check_points(&format!("n={d} Lambda^{alpha}"), &lambda_power(&f, alpha), &want);
            let (out, _) = apply_multiplier(&f, &MultiplierSymbol::lambda(alpha)).unwrap();
            check_points(&format!("n={d} apply Lambda^{alpha}"), &out, &want);
        }
        for alpha in [-1.3, -1.0, 0.7, 1.0] {
            let want = through(&|k| {
                let m = k2(k);
                if m == 0.0 { real(0.0) } else { real(m.powf(alpha / 2.0)) }
            });
            check_points(&format!("n={d} D^{alpha}"), &d_power(&f, alpha), &want);
            let (out, _) = apply_multiplier(&f, &MultiplierSymbol::d(alpha)).unwrap();
            check_points(&format!("n={d} apply D^{alpha}"), &out, &want);
        }
        for axis in 0..d {
            let want = through(&|k| {
                let m = k2(k);
                if m == 0.0 { real(0.0) } else { I * (k[axis] as f64 / m.sqrt()) }
            });
            check_points(&format!("n={d} R_{axis}"), &riesz(&f, axis), &want);
            let (out, _) = apply_multiplier(&f, &MultiplierSymbol::riesz(axis)).unwrap();
            check_points(&format!("n={d} apply R_{axis}"), &out, &want);
            let want = through(&|k| I * k[axis] as f64);
            check_points(&format!("n={d} d_{axis}"), &derivative(&f, axis), &want);
        }
        let want = through(&|k| {
            let m = k2(k);
            if m == 0.0 { real(0.0) } else { real(-1.0 / m) }
        });
        check_points(&format!("n={d} inv_laplacian"), &inv_laplacian(&f), &want);
        let (out, _) = apply_multiplier(&f, &MultiplierSymbol::inverse_laplacian()).unwrap();
        check_points(&format!("n={d} apply inverse_laplacian"), &out, &want);
        let want = through(&|k| real(-k2(k)));
        check_points(&format!("n={d} laplacian"), &laplacian(&f), &want);
    }
}

#[test]
fn vector_multipliers() {
    for (g, b) in grids() {
        let d = g.dim();
        let v: Vec<SpectralScalar> = (0..d).map(|j| random_full_band(g, 30 + j as u64, true)).collect();
        let vh: Vec<Vec<Complex64>> = v.iter().map(|c| b.analyze(&b.synth(c.coeffs()))).collect();

        let mut div = vec![Complex64::default(); b.len()];
        for (j, c) in vh.iter().enumerate() {
            div = add(&div, &b.deriv(c, j));
        }
        check_points(&format!("n={d} divergence"), &divergence(&v), &b.synth(&div));

        // A^df_j = A_j - k_j (k·Â)/|k|² off the mean, A^cf_j = k_j (k·Â)/|k|², mean kept apart
        let split = helmholtz_split(&v);
        for j in 0..d {
            let mut cf = vec![Complex64::default(); b.len()];
            for (flat, k) in b.ks.iter().enumerate() {
                let m = k2(k);
                if m == 0.0 {
                    continue;
                }
                let dot: Complex64 = (0..d).map(|l| vh[l][flat] * k[l] as f64).sum();
                cf[flat] = dot * (k[j] as f64 / m);
            }
            let mut df = sub(&vh[j], &cf);
            df[0] = Complex64::default();
            check_points(&format!("n={d} cf_{j}"), &split.cf[j], &b.synth(&cf));
            check_points(&format!("n={d} df_{j}"), &split.df[j], &b.synth(&df));
            assert!((split.mean[j] - vh[j][0]).norm() <= TOL);
        }
    }
}

#[test]
fn spatial_norms() {
    for (g, b) in grids() {
        let d = g.dim();
        let f = random_full_band(g, 50 + d as u64, false);
        let pts = b.synth(f.coeffs());
        let mean_sq = pts.iter().map(|v| v.norm_sqr()).sum::<f64>() / pts.len() as f64;
        check_value(&format!("n={d} L2"), f.norm_l2(), mean_sq.sqrt());
        let fh = b.analyze(&pts);
        for s in [-1.0, 0.0, 0.8, 2.5] {
            let want: f64 = fh
                .iter()
                .zip(&b.ks)
                .map(|(c, k)| (1.0 + k2(k)).powf(s) * c.norm_sqr())
                .sum::<f64>()
                .sqrt();
            check_value(&format!("n={d} H^{s}"), sobolev_norm(&f, s), want);
        }
    }
}

#[test]
fn theorem_norms() {
    let exps = SobolevExponents { s: 1.3, r: 0.9, epsilon: 0.05 };
    for (g, b) in grids() {
        let d = g.dim();
        let st = random_state(g, 60 + d as u64, 1.0);
        let h = |c: &[Complex64], s: f64| -> f64 {
            c.iter().zip(&b.ks).map(|(v, k)| (1.0 + k2(k)).powf(s) * v.norm_sqr()).sum()
        };
        let report = theorem_norm_report(&st, &exps);
        check_value("phi_hs", report.phi_hs, h(st.phi.coeffs(), exps.s).sqrt());
        check_value("phi_t", report.phi_t_hs_minus_1, h(st.phi_t.coeffs(), exps.s - 1.0).sqrt());
        let mut da = 0.0;
        let mut at = 0.0;
        for mu in 0..=d {
            for j in 0..d {
                da += h(&b.deriv(st.a[mu].coeffs(), j), exps.r - 1.0);
            }
            at += h(st.a_t[mu].coeffs(), exps.r - 1.0);
        }
        check_value("da", report.da_hr_minus_1, da.sqrt());
        check_value("a_t", report.a_t_hr_minus_1, at.sqrt());
        let mut fs = 0.0;
        for k in 1..=d {
            let f0k = sub(st.a_t[k].coeffs(), &b.deriv(st.a[0].coeffs(), k - 1));
            fs += h(&f0k, exps.s - 1.0);
            for l in k + 1..=d {
                let fkl = sub(&b.deriv(st.a[l].coeffs(), k - 1), &b.deriv(st.a[k].coeffs(), l - 1));
                fs += h(&fkl, exps.s - 1.0);
            }
        }
        check_value("faraday", report.f_hs_minus_1, fs.sqrt());
    }
}

#[test]
fn currents_and_wave_sources() {
    for (g, b) in grids() {
        let d = g.dim();
        let st = random_state(g, 70 + d as u64, 1.7);
        let p = state_points(&b, &st);
        let j = oracle_current(&b, &p);
        let lib_j = current(&st);
        let lib_n = rhs_n(&st);
        for mu in 0..=d {
            check_coeffs(&format!("n={d} j_{mu}"), &lib_j[mu], &j[mu]);
            check_coeffs(&format!("n={d} N_{mu}"), &lib_n[mu], &scale(&j[mu], -1.0));
        }
        check_value(&format!("n={d} charge"), charge(&st), j[0][0].re);
        check_coeffs(&format!("n={d} M"), &rhs_m(&st), &oracle_m(&b, &st, &p));
        check_coeffs(&format!("n={d} Mtilde"), &rhs_mtilde(&st), &oracle_mtilde(&b, &st, &p));
        for sign in [1.0, -1.0] {
            let lib = faraday_sources_with_sign(&st, sign);
            for (mu, nu, want) in oracle_faraday(&b, &st, &p, sign) {
                check_coeffs(&format!("n={d} sign {sign} F_{mu}{nu}"), lib.get(mu, nu), &want);
            }
        }
        let (u, norm) = gauge_residual(&st);
        let mut want = scale(st.a_t[0].coeffs(), -1.0);
        for k in 1..=d {
            want = add(&want, &b.deriv(st.a[k].coeffs(), k - 1));
        }
        check_coeffs(&format!("n={d} gauge"), &u, &want);
        check_value("gauge norm", norm, want.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
    }
}

#[test]
fn null_forms() {
    for (g, b) in grids() {
        let d = g.dim();
        let st = random_state(g, 80 + d as u64, 1.0);
        let u = FieldWithTimeDeriv::new(st.phi.clone(), st.phi_t.clone());
        let v = FieldWithTimeDeriv::new(st.a[0].clone(), st.a_t[0].clone());
        let w = FieldWithTimeDeriv::new(st.a[d].clone(), st.a_t[d].clone());
        for al in 0..=d {
            for be in 0..=d {
                for (x, y, tag) in [(&u, &v, "cplx"), (&v, &w, "real")] {
                    let lib = null_form(al, be, x, y);
                    let want = if al == be {
                        vec![Complex64::default(); b.len()]
                    } else {
                        oracle_null_form(&b, al, be, x, y)
                    };
                    check_coeffs(&format!("n={d} Q_{al}{be} {tag}"), &lib, &want);
                }
            }
        }

        let inter = decompose_interaction(&st);
        let a0 = b.points(st.a[0].coeffs());
        let pt = b.points(st.phi_t.coeffs());
        let mut acc: Vec<Complex64> = (0..b.len()).map(|i| -a0[i] * pt[i]).collect();
        for j in 1..=d {
            let aj = b.points(st.a[j].coeffs());
            let dp = b.points(&b.deriv(st.phi.coeffs(), j - 1));
            for i in 0..b.len() {
                acc[i] += aj[i] * dp[i];
            }
        }
        let direct = b.finish(&acc, false);
        check_coeffs(&format!("n={d} direct"), &inter.direct, &direct);

        // D^{-1} R_j has symbol i k_j / |k|²
        let dr = |c: &[Complex64], j: usize| {
            b.symbol(c, |k| {
                let m = k2(k);
                if m == 0.0 { Complex64::default() } else { I * k[j] as f64 / m }
            })
        };
        let to = |c: Vec<Complex64>| SpectralScalar::from_coeffs(g, c, true).unwrap();
        let mut p1 = vec![Complex64::default(); b.len()];
        for j in 1..=d {
            let x = FieldWithTimeDeriv::new(to(dr(st.a[0].coeffs(), j - 1)), to(dr(st.a_t[0].coeffs(), j - 1)));
            p1 = sub(&p1, &oracle_null_form(&b, 0, j, &x, &u));
        }
        check_coeffs(&format!("n={d} P1"), &inter.p1, &p1);
        let mut p2 = vec![Complex64::default(); b.len()];
        for j in 1..=d {
            for k in 1..=d {
                if j == k {
                    continue;
                }
                let y = sub(&dr(st.a[k].coeffs(), j - 1), &dr(st.a[j].coeffs(), k - 1));
                let y = FieldWithTimeDeriv::new(to(y), SpectralScalar::zeros(g, true));
                p2 = sub(&p2, &scale(&oracle_null_form(&b, j, k, &y, &u), 0.5));
            }
        }
        check_coeffs(&format!("n={d} P2"), &inter.p2, &p2);
    }
}

/// Deterministic pseudo-random lattice values.
fn wobble(len: usize, seed: f64) -> Vec<Complex64> {
    (0..len)
        .map(|i| {
            let x = i as f64 + seed;
            Complex64::new((x * 0.731).sin() + (x * x * 1e-3).cos(), (x * 1.377 + seed).cos())
        })
        .collect()
}

/// Space-time direct sums over `[nt] × (Z/N)^n`, time index most significant.
struct StBrute<'a> {
    b: &'a Brute,
    nt: usize,
}

impl StBrute<'_> {
    fn tau(&self, it: usize) -> i64 {
        if it <= self.nt / 2 { it as i64 } else { it as i64 - self.nt as i64 }
    }

    fn analyze(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (len, nt) = (self.b.len(), self.nt);
        // spatial sums per time slice, then temporal sums per frequency
        let slices: Vec<Vec<Complex64>> = (0..nt).map(|j| self.b.analyze(&v[j * len..(j + 1) * len])).collect();
        let mut out = vec![Complex64::default(); nt * len];
        for it in 0..nt {
            for f in 0..len {
                let s: Complex64 = (0..nt)
                    .map(|j| {
                        let t = std::f64::consts::TAU * j as f64 / nt as f64;
                        slices[j][f] * Complex64::from_polar(1.0, -(it as f64) * t)
                    })
                    .sum();
                out[it * len + f] = s / nt as f64;
            }
        }
        out
    }

    fn weight(&self, c: &[Complex64], m: impl Fn(f64, &[i64]) -> f64) -> f64 {
        let len = self.b.len();
        c.iter()
            .enumerate()
            .map(|(i, v)| m(self.tau(i / len) as f64, &self.b.ks[i % len]) * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn jap(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[test]
fn spacetime_norms_and_multipliers() {
    for (g, b) in grids() {
        let d = g.dim();
        let nt = if d == 4 { 4 } else { 8 };
        let sb = StBrute { b: &b, nt };
        let vals = wobble(nt * b.len(), d as f64);
        let u = SpaceTimeField::from_point_values(g, nt, vals.clone(), Window::None).unwrap();
        let uh = sb.analyze(&vals);
        assert!(rel_gap(u.coeffs(), &uh) <= TOL, "n={d} coefficients");
        for (s, bb) in [(0.0, 0.0), (0.8, 0.6), (-0.5, 1.2)] {
            let want = sb.weight(&uh, |tau, k| (1.0 + k2(k)).powf(s) * jap(tau.abs() - k2(k).sqrt()).powf(2.0 * bb));
            check_value(&format!("n={d} H^{s},{bb}"), u.hsb_norm(s, bb), want);
            let want = sb.weight(&uh, |tau, k| {
                let m = k2(k);
                if m == 0.0 { 0.0 } else { m.powf(s) * jap(tau.abs() - m.sqrt()).powf(2.0 * bb) }
            });
            check_value(&format!("n={d} homogeneous H^{s},{bb}"), u.hsb_norm_homogeneous(s, bb).0, want);
        }
        check_value("L2", u.norm_l2(), (vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / vals.len() as f64).sqrt());

        let pow = |x: f64, a: f64| if x == 0.0 { if a == 0.0 { 1.0 } else { 0.0 } } else { x.powf(a) };
        let cases: [(MultiplierSymbol, Box<dyn Fn(f64, f64) -> f64>); 4] = [
            (MultiplierSymbol::new(MultiplierKind::Dminus, 0.7), Box::new(move |t: f64, k: f64| pow((t.abs() - k).abs(), 0.7))),
            (MultiplierSymbol::new(MultiplierKind::Dplus, -0.4), Box::new(move |t: f64, k: f64| pow(t.abs() + k, -0.4))),
            (MultiplierSymbol::new(MultiplierKind::LambdaPlus, 1.1), Box::new(|t: f64, k: f64| (1.0 + (t.abs() + k).powi(2)).powf(0.55))),
            (MultiplierSymbol::lambda(-0.9), Box::new(|_t: f64, k: f64| (1.0 + k * k).powf(-0.45))),
        ];
        let len = b.len();
        for (sym, f) in &cases {
            let lib = u.apply_multiplier(sym);
            let want: Vec<Complex64> = uh
                .iter()
                .enumerate()
                .map(|(i, c)| c * f(sb.tau(i / len) as f64, k2(&b.ks[i % len]).sqrt()))
                .collect();
            assert!(rel_gap(lib.coeffs(), &want) <= TOL, "n={d} {sym:?}");
        }
        let abs = u.abs();
        for (x, y) in abs.coeffs().iter().zip(&uh) {
            assert!((x.re - y.norm()).abs() <= TOL && x.im == 0.0);
        }
    }
}

#[test]
fn spacetime_product_is_cyclic_convolution() {
    for (g, b) in grids() {
        let d = g.dim();
        let nt = if d == 4 { 4 } else { 8 };
        let len = b.len();
        let total = nt * len;
        // sparse spectra keep the direct convolution cheap in four dimensions
        let sparse = |seed: f64| -> Vec<Complex64> {
            wobble(total, seed)
                .into_iter()
                .enumerate()
                .map(|(i, v)| if (i * 7 + seed as usize) % 11 == 0 { v } else { Complex64::default() })
                .collect()
        };
        let (ah, bh) = (sparse(1.0), sparse(4.0));
        let u = SpaceTimeField::from_coeffs(g, nt, ah.clone(), Window::None).unwrap();
        let v = SpaceTimeField::from_coeffs(g, nt, bh.clone(), Window::None).unwrap();
        let lib = u.product(&v).unwrap();
        let mut want = vec![Complex64::default(); total];
        let live_a: Vec<usize> = (0..total).filter(|&i| ah[i] != Complex64::default()).collect();
        let live_b: Vec<usize> = (0..total).filter(|&i| bh[i] != Complex64::default()).collect();
        for &i in &live_a {
            for &j in &live_b {
                let it = (i / len + j / len) % nt;
                let sp = b.idx[i % len]
                    .iter()
                    .zip(&b.idx[j % len])
                    .fold(0, |acc, (x, y)| acc * N + (x + y) % N);
                want[it * len + sp] += ah[i] * bh[j];
            }
        }
        assert!(rel_gap(lib.coeffs(), &want) <= TOL, "n={d} product");
    }
}

#[test]
fn free_wave_streaming_norms() {
    for (g, b) in grids() {
        let d = g.dim();
        let nt = 16;
        for window in [Window::None, Window::CosineSquared] {
            let mut w = FreeWave::new(g, window);
            let mut modes = Vec::new();
            for (i, k) in b.ks.iter().enumerate().filter(|(_, k)| k.iter().all(|v| v.abs() < 3)).step_by(3) {
                let amp = Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos());
                let sign = if i % 2 == 0 { 1 } else { -1 };
                w.push(k, amp, sign).unwrap();
                modes.push((i, amp, sign as f64));
            }
            // repeated wavevector with the opposite sign
            w.push(&b.ks[modes[1].0].clone(), Complex64::new(0.3, -0.2), -(modes[1].2 as i8)).unwrap();
            modes.push((modes[1].0, Complex64::new(0.3, -0.2), -modes[1].2));

            let mut spec = vec![vec![Complex64::default(); nt]; b.len()];
            for (it, row) in (0..nt).map(|it| (it, it as f64)) {
                for j in 0..nt {
                    let t = std::f64::consts::TAU * j as f64 / nt as f64;
                    let wt = match window {
                        Window::None => 1.0,
                        Window::CosineSquared => (t / 2.0).sin().powi(2),
                    };
                    for &(f, amp, sign) in &modes {
                        let om = k2(&b.ks[f]).sqrt();
                        spec[f][it] += amp * wt * Complex64::from_polar(1.0, sign * om * t - row * t) / nt as f64;
                    }
                }
            }
            for (s, bb) in [(0.0, 0.0), (1.0, 0.7), (0.5, -0.3)] {
                let mut acc = 0.0;
                let mut hom = 0.0;
                for (f, row) in spec.iter().enumerate() {
                    let m = k2(&b.ks[f]);
                    for (it, c) in row.iter().enumerate() {
                        let tau = if it <= nt / 2 { it as f64 } else { it as f64 - nt as f64 };
                        let base = jap(tau.abs() - m.sqrt()).powf(2.0 * bb) * c.norm_sqr();
                        acc += (1.0 + m).powf(s) * base;
                        if m > 0.0 {
                            hom += m.powf(s) * base;
                        }
                    }
                }
                check_value(&format!("n={d} {window:?} wave H^{s},{bb}"), w.hsb_norm(nt, s, bb).unwrap(), acc.sqrt());
                check_value(
                    &format!("n={d} {window:?} wave homogeneous"),
                    w.hsb_norm_homogeneous(nt, s, bb).unwrap().0,
                    hom.sqrt(),
                );
            }
        }
    }
}
