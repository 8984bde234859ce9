//! Consistency measurements on evolving states and the diagnostic time series.
//!
//! All norms are the normalized L² norm `(Σ_ξ |coeffs(ξ)|²)^{1/2}`.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{current, rhs_m, rhs_mtilde, rhs_n};
use crate::error::Result;
use crate::fields::{faraday_from_potential, sobolev_norm, Faraday, MkgState, SobolevExponents};
use crate::multiplier::{derivative, divergence, laplacian};
use crate::spectral::SpectralScalar;

/// Column names of a diagnostic record, in CSV order after `time`.
pub const COLUMNS: [&str; 7] = [
    "gauge_residual_L2",
    "charge",
    "maxwell_residual_L2",
    "faraday_gap_L2",
    "phi_Hs",
    "DA_Hr_minus_1",
    "m_gap_L2",
];

/// `u = ∂^μA_μ = -∂ₜA_0 + ∂^jA_j` and its L² norm.
pub fn gauge_residual(state: &MkgState) -> (SpectralScalar, f64) {
    let u = divergence(&state.a[1..]) - &state.a_t[0];
    let norm = u.norm_l2();
    (u, norm)
}

/// Lattice mean of `j_0`.
pub fn charge(state: &MkgState) -> f64 {
    current(state)[0].mean().re
}

/// `∂^νF_{μν} - j_μ` per component and their root sum of squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxwellResidual {
    pub components: Vec<f64>,
    pub total: f64,
}

impl MaxwellResidual {
    fn from_fields(fields: Vec<SpectralScalar>) -> Self {
        let components: Vec<f64> = fields.iter().map(|f| f.norm_l2()).collect();
        let total = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        Self { components, total }
    }
}

/// Maxwell residual at the midpoint of two consecutive states, with `F` taken
/// from the potentials.
///
/// The time derivative of `F_{0k}` is the difference quotient and every other
/// term is averaged over the two states, so the result is second order in the
/// step. `j_0` enters without its mean: the divergence of `F_{0k}` has none.
/// If both states carry the same time, [`maxwell_residual_instantaneous`] is
/// used instead.
pub fn maxwell_residual(state: &MkgState, state_prev: &MkgState) -> MaxwellResidual {
    let dt = state.t - state_prev.t;
    if dt == 0.0 {
        return maxwell_residual_instantaneous(state);
    }
    let n = state.dim();
    let f1 = faraday_from_potential(state);
    let f0 = faraday_from_potential(state_prev);
    let j1 = current(state);
    let j0 = current(state_prev);
    let avg = |a: &SpectralScalar, b: &SpectralScalar| (a + b).scaled_real(0.5);
    let mut out = Vec::with_capacity(n + 1);

    let e: Vec<SpectralScalar> = (1..=n).map(|k| avg(f1.get(0, k), f0.get(0, k))).collect();
    let mut rho = avg(&j1[0], &j0[0]);
    rho.coeffs_mut()[0] = Complex64::default();
    out.push(divergence(&e) - &rho);

    for k in 1..=n {
        // ∂^νF_{kν} = ∂ₜF_{0k} + ∂_l F_{kl}
        let mut r = (f1.get(0, k) - f0.get(0, k)).scaled_real(1.0 / dt);
        for l in 1..=n {
            if l != k {
                r += &derivative(&avg(&f1.component(k, l), &f0.component(k, l)), l - 1);
            }
        }
        r -= &avg(&j1[k], &j0[k]);
        out.push(r);
    }
    MaxwellResidual::from_fields(out)
}

/// Maxwell residual of a single state, with `∂ₜ²A` supplied by the equations
/// of motion `∂ₜ²A = ΔA - N`.
pub fn maxwell_residual_instantaneous(state: &MkgState) -> MaxwellResidual {
    let n = state.dim();
    let f = faraday_from_potential(state);
    let j = current(state);
    let nn = rhs_n(state);
    let mut out = Vec::with_capacity(n + 1);
    let e: Vec<SpectralScalar> = (1..=n).map(|k| f.get(0, k).clone()).collect();
    let mut rho = j[0].clone();
    rho.coeffs_mut()[0] = Complex64::default();
    out.push(divergence(&e) - &rho);
    for k in 1..=n {
        // ∂ₜF_{0k} = ∂ₜ²A_k - ∂_k ∂ₜA_0
        let mut r = laplacian(&state.a[k]) - &nn[k] - derivative(&state.a_t[0], k - 1);
        for l in 1..=n {
            if l != k {
                r += &derivative(&f.component(k, l), l - 1);
            }
        }
        r -= &j[k];
        out.push(r);
    }
    MaxwellResidual::from_fields(out)
}

/// `‖F_evolved - F(A)‖ / max(1, ‖F(A)‖)` for one state.
pub fn faraday_gap(evolved: &Faraday, state: &MkgState) -> f64 {
    let f = faraday_from_potential(state);
    evolved.distance(&f) / f.norm_l2().max(1.0)
}

/// Supremum of [`faraday_gap`] along paired trajectories.
pub fn faraday_consistency(evolved: &[Faraday], states: &[MkgState]) -> f64 {
    evolved
        .iter()
        .zip(states)
        .map(|(f, s)| faraday_gap(f, s))
        .fold(0.0, f64::max)
}

/// `‖M - M̃‖`, which vanishes in Lorenz gauge.
pub fn m_gap(state: &MkgState) -> f64 {
    (rhs_m(state) - rhs_mtilde(state)).norm_l2()
}

/// Spatial Sobolev norms of the solution components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `‖φ‖_{H^s}`
    pub phi_hs: f64,
    /// `‖∂ₜφ‖_{H^{s-1}}`
    pub phi_t_hs_minus_1: f64,
    /// `(Σ_{μ,j} ‖∂_jA_μ‖²_{H^{r-1}})^{1/2}`
    pub da_hr_minus_1: f64,
    /// `(Σ_μ ‖∂ₜA_μ‖²_{H^{r-1}})^{1/2}`
    pub a_t_hr_minus_1: f64,
    /// `(Σ_{μ<ν} ‖F_{μν}‖²_{H^{s-1}})^{1/2}`
    pub f_hs_minus_1: f64,
}

pub fn theorem_norm_report(state: &MkgState, exps: &SobolevExponents) -> NormReport {
    let (s, r) = (exps.s, exps.r);
    let n = state.dim();
    let rss = |it: &mut dyn Iterator<Item = f64>| it.map(|x| x * x).sum::<f64>().sqrt();
    let da = rss(&mut state
        .a
        .iter()
        .flat_map(|a| (0..n).map(move |j| sobolev_norm(&derivative(a, j), r - 1.0))));
    let at = rss(&mut state.a_t.iter().map(|a| sobolev_norm(a, r - 1.0)));
    let f = faraday_from_potential(state);
    let fs = rss(&mut f.components().iter().map(|c| sobolev_norm(c, s - 1.0)));
    NormReport {
        phi_hs: sobolev_norm(&state.phi, s),
        phi_t_hs_minus_1: sobolev_norm(&state.phi_t, s - 1.0),
        da_hr_minus_1: da,
        a_t_hr_minus_1: at,
        f_hs_minus_1: fs,
    }
}

/// Named diagnostics at one time. `blow_up` is set on the record that closes a
/// failed run; its values are NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blow_up: Option<String>,
}

impl DiagnosticRecord {
    /// Evaluates every column. `prev` selects the two-state Maxwell residual.
    pub fn measure(
        state: &MkgState,
        prev: Option<&MkgState>,
        faraday: &Faraday,
        exps: &SobolevExponents,
    ) -> Self {
        let maxwell = match prev {
            Some(p) => maxwell_residual(state, p),
            None => maxwell_residual_instantaneous(state),
        };
        let norms = theorem_norm_report(state, exps);
        let values = [
            gauge_residual(state).1,
            charge(state),
            maxwell.total,
            faraday_gap(faraday, state),
            norms.phi_hs,
            norms.da_hr_minus_1,
            m_gap(state),
        ];
        Self {
            t: state.t,
            values: COLUMNS
                .iter()
                .zip(values)
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            blow_up: None,
        }
    }

    pub fn blow_up(t: f64, reason: String) -> Self {
        Self {
            t,
            values: COLUMNS.iter().map(|k| (k.to_string(), f64::NAN)).collect(),
            blow_up: Some(reason),
        }
    }

    pub fn get(&self, column: &str) -> f64 {
        self.values.get(column).copied().unwrap_or(f64::NAN)
    }

    pub fn is_finite(&self) -> bool {
        self.values.values().all(|v| v.is_finite())
    }
}

/// Time series of diagnostic records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub records: Vec<DiagnosticRecord>,
}

impl Series {
    pub fn push(&mut self, r: DiagnosticRecord) {
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        self.records.iter().map(|r| r.get(name)).collect()
    }

    /// Largest finite value of a column (0 for an empty series).
    pub fn sup(&self, name: &str) -> f64 {
        self.column(name)
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn last(&self) -> Option<&DiagnosticRecord> {
        self.records.last()
    }

    /// CSV with header `time,<COLUMNS>` and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "time")?;
        for c in COLUMNS {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        for r in &self.records {
            write!(w, "{}", fmt_float(r.t))?;
            for c in COLUMNS {
                write!(w, ",{}", fmt_float(r.get(c)))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records)?)
    }
}

/// Scientific notation with 17 significant digits; `nan`, `inf`, `-inf` otherwise.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}
