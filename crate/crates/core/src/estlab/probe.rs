//! Empirical probes: ratios of left- to right-hand sides over random
//! ensembles, aggregated per resolution and fitted for growth in `N`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MkgError, Result};
use crate::grid::TorusGrid;
use crate::multiplier::{MultiplierKind, MultiplierSymbol};
use crate::spectral::PointField;

use super::spacetime::{check_nt, time_points};
use super::waves::{ensemble_radius, knapp, knapp_scales, random_free, FreeWave, RANDOM_FREE_DECAY};
use super::Window;

/// Right-hand sides below this are treated as degenerate trials.
pub const DEGENERATE_RHS: f64 = 1e-14;

/// Slope above which (over at least three resolutions) a probe is `growing`.
pub const GROWING_SLOPE: f64 = 0.2;
/// Largest `|slope|` for which a probe is `bounded`.
pub const BOUNDED_SLOPE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimate {
    /// `‖uv‖_{H^{-s0,0}} ≲ ‖u‖_{H^{s1,b}} ‖v‖_{H^{s2,b}}`
    Prop36 { s0: f64, s1: f64, s2: f64 },
    /// `‖u‖_{L^q_t L^r_x} ≲ ‖u‖_{H^{n/2-n/r-1/q, b}}`; `q` may be infinite
    /// (written `"inf"` in JSON).
    Strichartz {
        #[serde(with = "extended_float")]
        q: f64,
        r: f64,
    },
    /// `‖D^{β0}(uv)‖_{L^q_t L²_x} ≲ ‖u‖_{Ḣ^{α1,b}} ‖v‖_{Ḣ^{α2,b}}`
    Lv {
        q: f64,
        alpha1: f64,
        alpha2: f64,
        beta0: f64,
    },
    /// `‖Q(u,v)‖_{L²}` against the three-term bound with exponents `1/2 ∓ 2ε`.
    Nullgain { eps: f64 },
}

impl Estimate {
    pub fn name(&self) -> &'static str {
        match self {
            Estimate::Prop36 { .. } => "prop36",
            Estimate::Strichartz { .. } => "strichartz",
            Estimate::Lv { .. } => "lv",
            Estimate::Nullgain { .. } => "nullgain",
        }
    }

    fn is_bilinear(&self) -> bool {
        !matches!(self, Estimate::Strichartz { .. })
    }

    /// Spatial regularity used to shape random amplitudes of `u` and `v`.
    fn decay_exponents(&self, dim: usize) -> (f64, f64) {
        match *self {
            Estimate::Prop36 { s1, s2, .. } => (s1, s2),
            Estimate::Strichartz { q, r } => {
                let s = strichartz_exponent(dim, q, r);
                (s, s)
            }
            Estimate::Lv { alpha1, alpha2, .. } => (alpha1, alpha2),
            Estimate::Nullgain { .. } => (2.5, 2.5),
        }
    }
}

/// Finite numbers as JSON numbers, infinities as `"inf"` / `"-inf"`.
mod extended_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                _ => Err(de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
            },
        }
    }
}

/// `n/2 - n/r - 1/q`.
pub fn strichartz_exponent(dim: usize, q: f64, r: f64) -> f64 {
    let n = dim as f64;
    n / 2.0 - n / r - 1.0 / q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ensemble {
    /// Dense random waves with amplitudes `⟨ξ⟩^{-(s + n/2 + decay)}` (default decay 2),
    /// `s` being the regularity the estimate assigns to the wave.
    RandomFree {
        #[serde(default)]
        decay: Option<f64>,
    },
    /// Slab around `direction` (default first axis) of transverse size
    /// `thickness` (default `√λ`); the scale `λ` cycles through `2, 4, …, N/4` over trials.
    /// For bilinear estimates `v` is the mirror slab on the backward sheet, so
    /// `u` and `v` share one null direction and `uv` sits at low frequency.
    Knapp {
        #[serde(default)]
        direction: Option<Vec<f64>>,
        #[serde(default)]
        thickness: Option<f64>,
    },
    /// `u` on mode `k` (default first unit vector), `v` on `l` (default `k`), both forward.
    SingleMode {
        #[serde(default)]
        k: Option<Vec<i64>>,
        #[serde(default)]
        l: Option<Vec<i64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Nt")]
    pub nt: usize,
}

impl Ensemble {
    pub fn random_free() -> Self {
        Ensemble::RandomFree { decay: None }
    }

    pub fn knapp() -> Self {
        Ensemble::Knapp {
            direction: None,
            thickness: None,
        }
    }
}

impl Resolution {
    /// Temporal points default to `max(2N, 16)`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            nt: (2 * n).max(16),
        }
    }
}

fn default_trials() -> usize {
    50
}

fn default_epsilon() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub dim: usize,
    pub estimate: Estimate,
    pub ensemble: Ensemble,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub resolutions: Vec<Resolution>,
    #[serde(default)]
    pub seed: u64,
    /// Right-hand norms use `b = 1/2 + epsilon`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub window: Window,
}

impl ProbeConfig {
    pub fn new(dim: usize, estimate: Estimate, ensemble: Ensemble, sizes: &[usize]) -> Self {
        Self {
            dim,
            estimate,
            ensemble,
            trials: default_trials(),
            resolutions: sizes.iter().map(|&n| Resolution::new(n)).collect(),
            seed: 0,
            epsilon: default_epsilon(),
            window: Window::CosineSquared,
        }
    }

    pub fn b(&self) -> f64 {
        0.5 + self.epsilon
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(MkgError::InvalidProbe("trials must be positive".into()));
        }
        if self.resolutions.is_empty() {
            return Err(MkgError::InvalidProbe("no resolutions given".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(MkgError::InvalidProbe(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        for r in &self.resolutions {
            TorusGrid::new(self.dim, r.n)?;
            check_nt(r.nt)?;
        }
        let finite = match self.estimate {
            Estimate::Prop36 { s0, s1, s2 } => [s0, s1, s2].iter().all(|v| v.is_finite()),
            Estimate::Strichartz { q, r } => !q.is_nan() && q > 0.0 && r.is_finite() && r > 0.0,
            Estimate::Lv {
                q,
                alpha1,
                alpha2,
                beta0,
            } => [q, alpha1, alpha2, beta0].iter().all(|v| v.is_finite()) && q > 0.0,
            Estimate::Nullgain { eps } => eps.is_finite(),
        };
        if !finite {
            return Err(MkgError::InvalidProbe(format!(
                "exponents of {} are out of range",
                self.estimate.name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub conditions: Vec<Condition>,
}

/// Evaluates the hypotheses of the estimate for dimension `dim`.
pub fn admissibility(dim: usize, estimate: &Estimate) -> Admissibility {
    let n = dim as f64;
    let c = |name: &str, holds: bool| Condition {
        name: name.to_string(),
        holds,
    };
    let conditions = match *estimate {
        Estimate::Prop36 { s0, s1, s2 } => {
            let sum = s0 + s1 + s2;
            vec![
                c("n >= 4", dim >= 4),
                c("s0+s1+s2 > (n-1)/2", sum > (n - 1.0) / 2.0),
                c("(s0+s1+s2)+s1+s2 > n/2", sum + s1 + s2 > n / 2.0),
                c("s0+s1 >= 0", s0 + s1 >= 0.0),
                c("s0+s2 >= 0", s0 + s2 >= 0.0),
                c("s1+s2 >= 0", s1 + s2 >= 0.0),
            ]
        }
        Estimate::Strichartz { q, r } => vec![
            c("2 <= q <= inf", q >= 2.0),
            c("2 <= r < inf", (2.0..f64::INFINITY).contains(&r)),
            c("2/q <= (n-1)(1/2-1/r)", 2.0 / q <= (n - 1.0) * (0.5 - 1.0 / r) + 1e-12),
        ],
        Estimate::Lv {
            q,
            alpha1,
            alpha2,
            beta0,
        } => {
            let top = n / 2.0 + 0.5 - 2.0 / q;
            vec![
                c("n >= 4", dim >= 4),
                c("1 < q <= 2", q > 1.0 && q <= 2.0),
                c(
                    "1/q = n/2 - alpha1 - alpha2 + beta0",
                    (1.0 / q - (n / 2.0 - alpha1 - alpha2 + beta0)).abs() <= 1e-9,
                ),
                c("beta0 > 2/q - (n+1)/2", beta0 > 2.0 / q - (n + 1.0) / 2.0),
                c("alpha1 < n/2 + 1/2 - 2/q", alpha1 < top),
                c("alpha2 < n/2 + 1/2 - 2/q", alpha2 < top),
                c("alpha1 >= 0", alpha1 >= 0.0),
                c("alpha2 >= 0", alpha2 >= 0.0),
            ]
        }
        Estimate::Nullgain { eps } => vec![c("0 <= eps <= 1/4", (0.0..=0.25).contains(&eps))],
    };
    Admissibility {
        admissible: conditions.iter().all(|c| c.holds),
        conditions,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Nt")]
    pub nt: usize,
    pub trials: usize,
    pub skipped: usize,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
    pub ratios: Vec<f64>,
}

impl ResolutionReport {
    fn from_ratios(res: Resolution, trials: usize, skipped: usize, ratios: Vec<f64>) -> Self {
        let mut sorted = ratios.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let (max, median, mean) = if sorted.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let m = sorted.len();
            let median = if m % 2 == 1 {
                sorted[m / 2]
            } else {
                0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
            };
            (sorted[m - 1], median, sorted.iter().sum::<f64>() / m as f64)
        };
        Self {
            n: res.n,
            nt: res.nt,
            trials,
            skipped,
            max,
            median,
            mean,
            ratios,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub config: ProbeConfig,
    pub admissibility: Admissibility,
    pub resolutions: Vec<ResolutionReport>,
    /// Least-squares slope of `log(max ratio)` against `log N`.
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "N",
    "Nt",
    "trials",
    "skipped",
    "max_ratio",
    "median_ratio",
    "mean_ratio",
];

impl ProbeReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = SUMMARY_COLUMNS.join(",");
        out.push('\n');
        for r in &self.resolutions {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                r.nt,
                r.trials,
                r.skipped,
                crate::diagnostics::fmt_float(r.max),
                crate::diagnostics::fmt_float(r.median),
                crate::diagnostics::fmt_float(r.mean)
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }
}

/// Least-squares slope of `ln y` against `ln x`; `None` for fewer than two points.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Growing needs a slope above 0.2 over at least three resolutions, bounded
/// needs `|slope| ≤ 0.1` over at least three; anything else is inconclusive.
pub fn verdict(slope: Option<f64>, resolutions: usize) -> Verdict {
    match slope {
        Some(s) if resolutions >= 3 && s > GROWING_SLOPE => Verdict::Growing,
        Some(s) if resolutions >= 3 && s.abs() <= BOUNDED_SLOPE => Verdict::Bounded,
        _ => Verdict::Inconclusive,
    }
}

/// Runs every trial at every resolution.
pub fn probe(config: &ProbeConfig) -> Result<ProbeReport> {
    config.validate()?;
    let admissibility = admissibility(config.dim, &config.estimate);
    let mut reports = Vec::with_capacity(config.resolutions.len());
    for &res in &config.resolutions {
        let grid = TorusGrid::new(config.dim, res.n)?;
        let mut ratios = Vec::with_capacity(config.trials);
        let mut skipped = 0;
        for trial in 0..config.trials {
            let (u, v) = trial_waves(config, &grid, res.n, trial)?;
            let (lhs, rhs) = sides(&config.estimate, &u, v.as_ref(), res.nt, config.b())?;
            if !(rhs >= DEGENERATE_RHS) || !lhs.is_finite() {
                skipped += 1;
                continue;
            }
            ratios.push(lhs / rhs);
        }
        log::debug!("{} N={} done: {} ratios", config.estimate.name(), res.n, ratios.len());
        reports.push(ResolutionReport::from_ratios(res, config.trials, skipped, ratios));
    }
    let usable: Vec<&ResolutionReport> = reports.iter().filter(|r| r.max > 0.0).collect();
    let xs: Vec<f64> = usable.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.max).collect();
    let slope = loglog_slope(&xs, &ys);
    let verdict = verdict(slope, xs.len());
    Ok(ProbeReport {
        config: config.clone(),
        admissibility,
        resolutions: reports,
        slope,
        verdict,
    })
}

/// Null-form gain probe with default settings.
pub fn nullform_gain_probe(
    dim: usize,
    eps: f64,
    ensemble: Ensemble,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let mut cfg = ProbeConfig::new(dim, Estimate::Nullgain { eps }, ensemble, sizes);
    cfg.trials = trials;
    cfg.seed = seed;
    probe(&cfg)
}

fn trial_waves(
    config: &ProbeConfig,
    grid: &TorusGrid,
    size: usize,
    trial: usize,
) -> Result<(FreeWave, Option<FreeWave>)> {
    let bilinear = config.estimate.is_bilinear();
    let (su, sv) = config.estimate.decay_exponents(config.dim);
    let base = ((size as u64) << 32) | (2 * trial as u64);
    let window = config.window;
    let make = |which: u64, s: f64| -> Result<FreeWave> {
        let stream = base + which;
        match &config.ensemble {
            Ensemble::RandomFree { decay } => Ok(random_free(
                *grid,
                config.seed,
                stream,
                s,
                decay.unwrap_or(RANDOM_FREE_DECAY),
                window,
            )),
            Ensemble::Knapp {
                direction,
                thickness,
            } => {
                let scales = knapp_scales(grid);
                let lambda = scales[trial % scales.len()];
                let mut e1 = vec![0.0; config.dim];
                e1[0] = 1.0;
                let mut d = direction.clone().unwrap_or(e1);
                let th = thickness.unwrap_or(lambda.sqrt());
                // v is the counter-propagating partner: -ξ on τ = -|ξ|
                let sign = if which == 0 { 1 } else { -1 };
                if which == 1 {
                    d.iter_mut().for_each(|c| *c = -*c);
                }
                knapp(*grid, config.seed, stream, lambda, &d, th, sign, window)
            }
            Ensemble::SingleMode { k, l } => {
                let mut e1 = vec![0i64; config.dim];
                e1[0] = 1;
                let ku = k.clone().unwrap_or(e1);
                let kv = l.clone().unwrap_or_else(|| ku.clone());
                let kk = if which == 0 { ku } else { kv };
                let r = ensemble_radius(grid);
                if kk.iter().any(|c| c.abs() > r) {
                    return Err(MkgError::InvalidProbe(format!(
                        "mode {kk:?} outside |k_i| <= {r} at N = {size}"
                    )));
                }
                super::waves::single_mode(*grid, &kk, 1, window)
            }
        }
    };
    let u = make(0, su)?;
    let v = if bilinear { Some(make(1, sv)?) } else { None };
    Ok((u, v))
}

/// Left- and right-hand sides of one trial.
pub fn sides(
    estimate: &Estimate,
    u: &FreeWave,
    v: Option<&FreeWave>,
    nt: usize,
    b: f64,
) -> Result<(f64, f64)> {
    check_nt(nt)?;
    let need_v = || v.ok_or_else(|| MkgError::InvalidProbe("bilinear estimate needs two waves".into()));
    match *estimate {
        Estimate::Prop36 { s0, s1, s2 } => {
            let v = need_v()?;
            let slices = product_slices(u, v, nt, |k2| (1.0 + k2).powf(-s0))?;
            let lhs = (slices.iter().sum::<f64>() / nt as f64).sqrt();
            let rhs = u.hsb_norm(nt, s1, b)? * v.hsb_norm(nt, s2, b)?;
            Ok((lhs, rhs))
        }
        Estimate::Strichartz { q, r } => {
            let lhs = lq_lr(u, nt, q, r);
            let rhs = u.hsb_norm(nt, strichartz_exponent(u.grid().dim(), q, r), b)?;
            Ok((lhs, rhs))
        }
        Estimate::Lv {
            q,
            alpha1,
            alpha2,
            beta0,
        } => {
            let v = need_v()?;
            let weight = |k2: f64| {
                if k2 == 0.0 {
                    if beta0 == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    k2.powf(beta0)
                }
            };
            let slices = product_slices(u, v, nt, weight)?;
            let lhs = time_norm(slices.iter().map(|s| s.sqrt()), q, nt);
            let rhs = u.hsb_norm_homogeneous(nt, alpha1, b)?.0 * v.hsb_norm_homogeneous(nt, alpha2, b)?.0;
            Ok((lhs, rhs))
        }
        Estimate::Nullgain { eps } => {
            let v = need_v()?;
            Ok((null_form_norm(u, v, nt), null_bound_norm(u, v, nt, eps)?))
        }
    }
}

fn time_norm(values: impl Iterator<Item = f64>, q: f64, nt: usize) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        (values.map(|x| x.powf(q)).sum::<f64>() / nt as f64).powf(1.0 / q)
    }
}

/// `‖u‖_{L^q_t L^r_x}` with mean-value measures on the lattice.
fn lq_lr(u: &FreeWave, nt: usize, q: f64, r: f64) -> f64 {
    let per_slice = time_points(nt).into_iter().map(|t| {
        let pts = u.coeffs_at(t).to_points();
        let m = pts.values().len() as f64;
        (pts.values().iter().map(|z| z.norm().powf(r)).sum::<f64>() / m).powf(1.0 / r)
    });
    time_norm(per_slice, q, nt)
}

/// Switch to pair sums when they are cheaper than transforms.
fn use_pair_sums(u: &FreeWave, v: &FreeWave) -> bool {
    (u.len() as u128) * (v.len() as u128) <= 4 * u.grid().len() as u128
}

/// Per time slice, `Σ_ξ weight(|ξ|²) |(uv)^(t_j, ξ)|²`.
pub fn product_slices(u: &FreeWave, v: &FreeWave, nt: usize, weight: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    if use_pair_sums(u, v) {
        product_slices_sparse(u, v, nt, weight)
    } else {
        product_slices_dense(u, v, nt, weight)
    }
}

pub(crate) fn product_slices_dense(
    u: &FreeWave,
    v: &FreeWave,
    nt: usize,
    weight: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    if u.grid() != v.grid() {
        return Err(MkgError::GridMismatch);
    }
    let table = u.grid().mode_table();
    let weights: Vec<f64> = table.norm_sqr.iter().map(|&k2| weight(k2)).collect();
    let flat_weight = weights.iter().all(|&w| w == 1.0);
    time_points(nt)
        .into_iter()
        .map(|t| {
            let a = u.points_at(t);
            let b = v.points_at(t);
            if flat_weight {
                return Ok(a.iter().zip(&b).map(|(x, y)| (x * y).norm_sqr()).sum::<f64>() / a.len() as f64);
            }
            let p = PointField::from_values(*u.grid(), a.iter().zip(&b).map(|(x, y)| x * y).collect())?;
            Ok(p.forward()
                .coeffs()
                .iter()
                .zip(&weights)
                .map(|(c, w)| w * c.norm_sqr())
                .sum())
        })
        .collect()
}

pub(crate) fn product_slices_sparse(
    u: &FreeWave,
    v: &FreeWave,
    nt: usize,
    weight: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let grid = *u.grid();
    if grid != *v.grid() {
        return Err(MkgError::GridMismatch);
    }
    let table = grid.mode_table();
    let mut targets = Vec::with_capacity(u.len() * v.len());
    let mut sum = vec![0i64; grid.dim()];
    for mu in u.modes() {
        for mv in v.modes() {
            for (s, (a, b)) in sum.iter_mut().zip(mu.k.iter().zip(&mv.k)) {
                *s = a + b;
            }
            targets.push(grid.flat_index(&sum) as u32);
        }
    }
    let mut acc = vec![Complex64::default(); grid.len()];
    let mut touched: Vec<u32> = targets.clone();
    touched.sort_unstable();
    touched.dedup();
    let window = u.window();
    Ok(time_points(nt)
        .into_iter()
        .map(|t| {
            let zu = u.phases(t);
            let zv = v.phases(t);
            let w2 = window.weight(t) * v.window().weight(t);
            let mut idx = 0;
            for a in &zu {
                for b in &zv {
                    acc[targets[idx] as usize] += a * b;
                    idx += 1;
                }
            }
            let mut s = 0.0;
            for &f in &touched {
                let c = acc[f as usize] * w2;
                s += weight(table.norm_sqr[f as usize]) * c.norm_sqr();
                acc[f as usize] = Complex64::default();
            }
            s
        })
        .collect())
}

/// `‖w² Q(u, v)‖_{L²}` with `Q` collecting every `Q_{αβ}`, `α < β`, of the unwindowed waves.
fn null_form_norm(u: &FreeWave, v: &FreeWave, nt: usize) -> f64 {
    let n = u.grid().dim();
    let mut acc = 0.0;
    for t in time_points(nt) {
        let w2 = u.window().weight(t) * v.window().weight(t);
        if w2 == 0.0 {
            continue;
        }
        let du: Vec<_> = (0..=n).map(|mu| u.free_derivative(t, mu).to_points()).collect();
        let dv: Vec<_> = (0..=n).map(|mu| v.free_derivative(t, mu).to_points()).collect();
        let m = du[0].values().len() as f64;
        for a in 0..=n {
            for b in a + 1..=n {
                let s: f64 = (0..du[0].values().len())
                    .map(|i| {
                        let q = du[a].values()[i] * dv[b].values()[i] - du[b].values()[i] * dv[a].values()[i];
                        q.norm_sqr()
                    })
                    .sum();
                acc += w2 * w2 * s / m;
            }
        }
    }
    (acc / nt as f64).sqrt()
}

/// L² norm of the three-term bound evaluated on `|û|`, `|v̂|`:
/// `D₊^a D₋^a (D₊^c U · D₊^c V) + D₊^a (D₊^c D₋^a U · D₊^c V) + D₊^a (D₊^c U · D₊^c D₋^a V)`
/// with `a = 1/2 - 2ε`, `c = 1/2 + 2ε`.
fn null_bound_norm(u: &FreeWave, v: &FreeWave, nt: usize, eps: f64) -> Result<f64> {
    let a = 0.5 - 2.0 * eps;
    let c = 0.5 + 2.0 * eps;
    let dp = |x| MultiplierSymbol::new(MultiplierKind::Dplus, x);
    let dm = |x| MultiplierSymbol::new(MultiplierKind::Dminus, x);
    let uu = u.materialize(nt)?.abs().apply_multiplier(&dp(c));
    let vv = v.materialize(nt)?.abs().apply_multiplier(&dp(c));
    let ua = uu.apply_multiplier(&dm(a));
    let va = vv.apply_multiplier(&dm(a));
    let t1 = uu.product(&vv)?.apply_multiplier(&dp(a)).apply_multiplier(&dm(a));
    let t2 = ua.product(&vv)?.apply_multiplier(&dp(a));
    let t3 = uu.product(&va)?.apply_multiplier(&dp(a));
    Ok((&(&t1 + &t2) + &t3).norm_l2())
}
