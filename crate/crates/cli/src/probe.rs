//! `mkg probe`: empirical constants of the bilinear and Strichartz estimates.

use std::path::PathBuf;

use mkg_core::estlab::{Resolution, Verdict};
use mkg_core::{probe, ProbeConfig};
use serde_json::{json, Value};

use crate::config::{parse, set_path};
use crate::error::{CliError, EXIT_ADMISSIBLE_GROWING};
use crate::output::write_manifest;

pub const PROBE_PRESETS: [&str; 4] = ["prop36-admissible", "prop36-violated", "nullgain-random", "nullgain-parallel"];
pub const REPORT_JSON: &str = "probe_report.json";
pub const SUMMARY_CSV: &str = "probe_summary.csv";

#[derive(Debug, Default, clap::Args)]
pub struct ProbeArgs {
    /// JSON probe configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named configuration (prop36-admissible, prop36-violated, nullgain-random, nullgain-parallel).
    #[arg(long)]
    pub preset: Option<String>,
    /// prop36, strichartz, lv or nullgain.
    #[arg(long)]
    pub estimate: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub s0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s2: Option<f64>,
    /// Time exponent; `inf` allowed for strichartz.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta0: Option<f64>,
    /// Null-form gain parameter.
    #[arg(long)]
    pub eps: Option<f64>,
    /// random (random_free), knapp or single (single_mode).
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated grid sizes; temporal points default to max(2N, 16).
    #[arg(long, value_delimiter = ',')]
    pub resolutions: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `b = 1/2 + epsilon` in the right-hand norms.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// none or cosine-squared.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long, default_value = "mkg-probe")]
    pub out: PathBuf,
}

pub fn preset(name: &str) -> Result<Value, CliError> {
    let knapp = json!({ "kind": "knapp" });
    let random = json!({ "kind": "random_free" });
    let sizes = json!([8, 16, 32]);
    let (dim, estimate, ensemble, sizes) = match name {
        "prop36-admissible" => (4, json!({ "kind": "prop36", "s0": 0.0, "s1": 0.8, "s2": 0.8 }), knapp, sizes),
        "prop36-violated" => (4, json!({ "kind": "prop36", "s0": 0.3, "s1": 0.3, "s2": 0.3 }), knapp, sizes),
        "nullgain-random" => (2, json!({ "kind": "nullgain", "eps": 0.05 }), random, sizes),
        "nullgain-parallel" => (
            2,
            json!({ "kind": "nullgain", "eps": 0.05 }),
            json!({ "kind": "single_mode", "k": [1, 1], "l": [2, 2] }),
            json!([16, 32, 64]),
        ),
        other => {
            return Err(CliError::config(
                "preset",
                format!("unknown probe preset `{other}` (known: {})", PROBE_PRESETS.join(", ")),
            ))
        }
    };
    let mut v = json!({ "dim": dim, "estimate": estimate, "ensemble": ensemble, "trials": 50 });
    set_path(&mut v, "resolutions", resolutions(&serde_json::from_value::<Vec<usize>>(sizes)?))?;
    Ok(v)
}

fn resolutions(sizes: &[usize]) -> Value {
    let list: Vec<Resolution> = sizes.iter().map(|&n| Resolution::new(n)).collect();
    serde_json::to_value(list).expect("plain data")
}

/// Probe configuration from preset or file, then flags.
pub fn resolve(args: &ProbeArgs) -> Result<ProbeConfig, CliError> {
    let mut v = match (&args.preset, &args.config) {
        (Some(_), Some(_)) => return Err(CliError::config("preset", "give either --preset or --config".into())),
        (Some(p), None) => preset(p)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?
        }
        (None, None) => json!({}),
    };
    if !v.is_object() {
        return Err(CliError::config("<root>", "expected a JSON object".into()));
    }
    if let Some(name) = &args.estimate {
        let same = v.pointer("/estimate/kind").and_then(Value::as_str) == Some(name.as_str());
        if !same {
            set_path(&mut v, "estimate", json!({ "kind": name }))?;
        }
    }
    let num = |x: f64| -> Result<Value, CliError> {
        serde_json::Number::from_f64(x)
            .map(Value::Number)
            .ok_or_else(|| CliError::config("estimate", format!("exponent {x} is not finite")))
    };
    for (key, val) in [
        ("s0", args.s0),
        ("s1", args.s1),
        ("s2", args.s2),
        ("r", args.r),
        ("alpha1", args.alpha1),
        ("alpha2", args.alpha2),
        ("beta0", args.beta0),
        ("eps", args.eps),
    ] {
        if let Some(x) = val {
            set_path(&mut v, &format!("estimate.{key}"), num(x)?)?;
        }
    }
    if let Some(q) = &args.q {
        let val = match q.parse::<f64>() {
            Ok(x) if x.is_finite() => num(x)?,
            _ => Value::String(q.clone()),
        };
        set_path(&mut v, "estimate.q", val)?;
    }
    if let Some(d) = args.dim {
        set_path(&mut v, "dim", json!(d))?;
    }
    if let Some(e) = &args.ensemble {
        let kind = match e.as_str() {
            "random" | "random_free" | "random-free" => "random_free",
            "knapp" => "knapp",
            "single" | "single_mode" | "single-mode" => "single_mode",
            other => return Err(CliError::config("ensemble", format!("unknown ensemble `{other}`"))),
        };
        if v.pointer("/ensemble/kind").and_then(Value::as_str) != Some(kind) {
            set_path(&mut v, "ensemble", json!({ "kind": kind }))?;
        }
    }
    if v.get("ensemble").is_none() {
        set_path(&mut v, "ensemble", json!({ "kind": "random_free" }))?;
    }
    if let Some(t) = args.trials {
        set_path(&mut v, "trials", json!(t))?;
    }
    if let Some(sizes) = &args.resolutions {
        set_path(&mut v, "resolutions", resolutions(sizes))?;
    }
    if v.get("resolutions").is_none() {
        set_path(&mut v, "resolutions", resolutions(&[8, 16, 32]))?;
    }
    if let Some(s) = args.seed {
        set_path(&mut v, "seed", json!(s))?;
    }
    if let Some(e) = args.epsilon {
        set_path(&mut v, "epsilon", num(e)?)?;
    }
    if let Some(w) = &args.window {
        let w = match w.as_str() {
            "none" => "none",
            "cosine" | "cosine-squared" | "cosine_squared" => "cosine_squared",
            other => return Err(CliError::config("window", format!("unknown window `{other}`"))),
        };
        set_path(&mut v, "window", json!(w))?;
    }
    let cfg: ProbeConfig = parse(v)?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgement {
    Fine,
    /// Growth with violated hypotheses.
    ExpectedGrowth,
    /// Growth although every hypothesis holds.
    RedFlag,
}

pub fn judge(verdict: Verdict, admissible: bool) -> Judgement {
    match (verdict, admissible) {
        (Verdict::Growing, true) => Judgement::RedFlag,
        (Verdict::Growing, false) => Judgement::ExpectedGrowth,
        _ => Judgement::Fine,
    }
}

pub fn cmd_probe(args: &ProbeArgs) -> Result<(), CliError> {
    let cfg = resolve(args)?;
    let report = probe(&cfg)?;
    std::fs::create_dir_all(&args.out)?;
    report.write_json(&args.out.join(REPORT_JSON))?;
    report.write_csv(&args.out.join(SUMMARY_CSV))?;

    let adm = &report.admissibility;
    println!("estimate {} on n = {}, {} trials per resolution", cfg.estimate.name(), cfg.dim, cfg.trials);
    for c in &adm.conditions {
        println!("  [{}] {}", if c.holds { "ok" } else { "violated" }, c.name);
    }
    println!("{:>5} {:>5} {:>8} {:>13} {:>13}", "N", "Nt", "skipped", "max ratio", "median ratio");
    for r in &report.resolutions {
        println!("{:>5} {:>5} {:>8} {:>13.5e} {:>13.5e}", r.n, r.nt, r.skipped, r.max, r.median);
    }
    let slope = report.slope.map_or("n/a".to_string(), |s| format!("{s:.4}"));
    println!("log-log slope {slope}, verdict {}", report.verdict);

    let judgement = judge(report.verdict, adm.admissible);
    write_manifest(
        &args.out,
        "probe",
        &cfg,
        if judgement == Judgement::RedFlag { "admissible_growing" } else { "completed" },
        &[REPORT_JSON.into(), SUMMARY_CSV.into()],
        &[],
        json!({ "verdict": report.verdict, "slope": report.slope, "admissible": adm.admissible }),
    )?;
    if judgement == Judgement::RedFlag {
        return Err(CliError::new(
            EXIT_ADMISSIBLE_GROWING,
            format!("admissible estimate measured growing (slope {slope}); this points at an implementation error"),
        ));
    }
    if judgement == Judgement::ExpectedGrowth {
        println!("notice: growth is expected here, the exponents violate the hypotheses of the estimate");
    }
    Ok(())
}
