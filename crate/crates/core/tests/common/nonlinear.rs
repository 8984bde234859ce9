//! Pointwise-loop oracles for the nonlinear terms, built on [`Brute`].

use mkg_core::nullforms::FieldWithTimeDeriv;
use mkg_core::MkgState;
use num_complex::Complex64;

use super::*;

/// Dealiased point values of a state, computed by direct synthesis.
pub struct Pts {
    pub phi: Vec<Complex64>,
    pub dmu: Vec<Vec<Complex64>>,
    pub a: Vec<Vec<Complex64>>,
    pub rho2: Vec<Complex64>,
}

pub fn state_points(b: &Brute, st: &MkgState) -> Pts {
    let d = b.dim;
    let phi = b.points(st.phi.coeffs());
    let mut dmu = vec![b.points(st.phi_t.coeffs())];
    for j in 0..d {
        dmu.push(b.points(&b.deriv(st.phi.coeffs(), j)));
    }
    let a = st.a.iter().map(|c| b.points(c.coeffs())).collect();
    let sq: Vec<Complex64> = phi.iter().map(|p| Complex64::new(p.norm_sqr(), 0.0)).collect();
    let rho2 = b.synth(&b.finish(&sq, true));
    Pts { phi, dmu, a, rho2 }
}

pub fn rho2_times(b: &Brute, p: &Pts, a: &[Complex64]) -> Vec<Complex64> {
    let prod: Vec<Complex64> = (0..b.len()).map(|i| Complex64::new(p.rho2[i].re * a[i].re, 0.0)).collect();
    b.finish(&prod, true)
}

pub fn oracle_current(b: &Brute, p: &Pts) -> Vec<Vec<Complex64>> {
    (0..=b.dim)
        .map(|mu| {
            let q: Vec<Complex64> = (0..b.len())
                .map(|i| Complex64::new((p.phi[i] * p.dmu[mu][i].conj()).im, 0.0))
                .collect();
            add(&b.finish(&q, true), &rho2_times(b, p, &p.a[mu]))
        })
        .collect()
}

pub fn minkowski(b: &Brute, p: &Pts) -> Vec<Complex64> {
    let w: Vec<Complex64> = (0..b.len())
        .map(|i| {
            let mut v = -p.a[0][i].re.powi(2);
            for aj in &p.a[1..] {
                v += aj[i].re.powi(2);
            }
            Complex64::new(v, 0.0)
        })
        .collect();
    b.synth(&b.finish(&w, true))
}

pub fn oracle_m(b: &Brute, st: &MkgState, p: &Pts) -> Vec<Complex64> {
    let w = minkowski(b, p);
    let acc: Vec<Complex64> = (0..b.len())
        .map(|i| {
            let mut c = -p.a[0][i].re * p.dmu[0][i];
            for j in 1..=b.dim {
                c += p.a[j][i].re * p.dmu[j][i];
            }
            2.0 * I * c + w[i].re * p.phi[i]
        })
        .collect();
    add(&b.finish(&acc, false), &scale(st.phi.coeffs(), st.mass * st.mass))
}

pub fn oracle_mtilde(b: &Brute, st: &MkgState, p: &Pts) -> Vec<Complex64> {
    let d = b.dim;
    let at0 = st.a_t[0].coeffs();
    let ah: Vec<&[Complex64]> = st.a[1..].iter().map(|c| c.coeffs()).collect();
    let mut grad_pot = Vec::new();
    let mut df = Vec::new();
    for j in 0..d {
        // D^{-2} ∂_j ∂_t A_0 and A_j - k_j (k·Â)/|k|²
        let gp: Vec<Complex64> = b
            .ks
            .iter()
            .enumerate()
            .map(|(f, k)| {
                let m = k2(k);
                if m == 0.0 { Complex64::default() } else { I * k[j] as f64 * at0[f] / m }
            })
            .collect();
        let dj: Vec<Complex64> = b
            .ks
            .iter()
            .enumerate()
            .map(|(f, k)| {
                let m = k2(k);
                if m == 0.0 {
                    return ah[j][f];
                }
                let dot: Complex64 = (0..d).map(|l| ah[l][f] * k[l] as f64).sum();
                ah[j][f] - dot * (k[j] as f64 / m)
            })
            .collect();
        grad_pot.push(b.points(&gp));
        df.push(b.points(&dj));
    }
    let w = minkowski(b, p);
    let acc: Vec<Complex64> = (0..b.len())
        .map(|i| {
            let mut br = p.a[0][i].re * p.dmu[0][i];
            for j in 0..d {
                br += (grad_pot[j][i].re - df[j][i].re) * p.dmu[j + 1][i];
            }
            -2.0 * I * br + w[i].re * p.phi[i]
        })
        .collect();
    add(&b.finish(&acc, false), &scale(st.phi.coeffs(), st.mass * st.mass))
}

/// `□F_{μν}` for `μ < ν`, returned as `(μ, ν, coefficients)`.
pub fn oracle_faraday(b: &Brute, st: &MkgState, p: &Pts, imq_sign: f64) -> Vec<(usize, usize, Vec<Complex64>)> {
    let d = b.dim;
    let a_rho: Vec<Vec<Complex64>> = p.a.iter().map(|a| rho2_times(b, p, a)).collect();
    let sig: Vec<Complex64> = (0..b.len())
        .map(|i| Complex64::new(2.0 * (p.phi[i].conj() * p.dmu[0][i]).re, 0.0))
        .collect();
    let sigma = b.synth(&b.finish(&sig, true));
    let im_q = |x: usize, y: usize| {
        let q: Vec<Complex64> = (0..b.len())
            .map(|i| Complex64::new(2.0 * (p.dmu[x][i] * p.dmu[y][i].conj()).im, 0.0))
            .collect();
        b.finish(&q, true)
    };
    let mut out = Vec::new();
    for k in 1..=d {
        let at = b.points(st.a_t[k].coeffs());
        let t: Vec<Complex64> = (0..b.len())
            .map(|i| Complex64::new(p.rho2[i].re * at[i].re + sigma[i].re * p.a[k][i].re, 0.0))
            .collect();
        let s = sub(&add(&scale(&im_q(0, k), imq_sign), &b.finish(&t, true)), &b.deriv(&a_rho[0], k - 1));
        out.push((0, k, scale(&s, -1.0)));
    }
    for j in 1..=d {
        for k in j + 1..=d {
            let s = sub(&add(&im_q(k, j), &b.deriv(&a_rho[j], k - 1)), &b.deriv(&a_rho[k], j - 1));
            out.push((j, k, s));
        }
    }
    out
}

pub fn oracle_null_form(b: &Brute, al: usize, be: usize, u: &FieldWithTimeDeriv, v: &FieldWithTimeDeriv) -> Vec<Complex64> {
    let part = |w: &FieldWithTimeDeriv, mu: usize| {
        if mu == 0 {
            b.points(w.f_t.coeffs())
        } else {
            b.points(&b.deriv(w.f.coeffs(), mu - 1))
        }
    };
    let (ua, ub, va, vb) = (part(u, al), part(u, be), part(v, al), part(v, be));
    let q: Vec<Complex64> = (0..b.len()).map(|i| ua[i] * vb[i] - ub[i] * va[i]).collect();
    b.finish(&q, u.is_real() && v.is_real())
}

