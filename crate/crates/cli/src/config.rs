//! Run configuration: JSON schema, presets, flag overrides and validation.

use std::path::PathBuf;

use mkg_core::grid::{MAX_DIM, MAX_LATTICE_POINTS};
use mkg_core::{SchemeKind, SobolevExponents};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;

pub const RUN_PRESETS: [&str; 2] = ["zero", "smalldata-n2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeKind,
    #[serde(default = "default_mass")]
    pub mass: f64,
    pub data: DataSource,
    #[serde(default)]
    pub exponents: Exponents,
    /// Diagnostics every `cadence` steps (first and last always).
    #[serde(default = "default_cadence")]
    pub cadence: usize,
    /// Intermediate snapshots every this many steps; 0 keeps only initial and final.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Constraint-solved data from seeded random fields.
    Random(RandomData),
    /// A snapshot written by `run` (any `snapshot_*.mkgs`).
    Snapshot(PathBuf),
    /// Named data: `zero` or `smalldata-n2`.
    Preset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomData {
    pub seed: u64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    /// Amplitude of the divergence-free electric field.
    #[serde(default)]
    pub electric: f64,
    /// Amplitude of the random magnetic seed.
    #[serde(default)]
    pub magnetic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Exponents {
    pub s: f64,
    pub r: f64,
    pub epsilon: f64,
}

impl Default for Exponents {
    fn default() -> Self {
        let d = SobolevExponents::default();
        Self { s: d.s, r: d.r, epsilon: d.epsilon }
    }
}

impl From<Exponents> for SobolevExponents {
    fn from(e: Exponents) -> Self {
        SobolevExponents { s: e.s, r: e.r, epsilon: e.epsilon }
    }
}

fn default_scheme() -> SchemeKind {
    SchemeKind::Rk4
}

fn default_mass() -> f64 {
    1.0
}

fn default_cadence() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("mkg-out")
}

fn default_amplitude() -> f64 {
    0.1
}

fn default_width() -> f64 {
    3.0
}

/// Random data behind the `smalldata-n2` preset.
pub fn smalldata() -> RandomData {
    RandomData { seed: 7, amplitude: 0.1, width: 1.0, electric: 0.05, magnetic: 0.05 }
}

/// Full configuration of a named preset, as JSON.
pub fn preset_config(name: &str) -> Result<Value, CliError> {
    let grid = match name {
        "zero" => json!({ "n": 2, "N": 16 }),
        "smalldata-n2" => json!({ "n": 2, "N": 32 }),
        other => return Err(unknown_preset("preset", other)),
    };
    Ok(json!({
        "grid": grid,
        "dt": 0.01,
        "T": 1.0,
        "scheme": "rk4",
        "data": { "preset": name },
        "cadence": 10,
    }))
}

fn unknown_preset(path: &str, name: &str) -> CliError {
    CliError::config(path, format!("unknown preset `{name}` (known: {})", RUN_PRESETS.join(", ")))
}

/// Sets `path` (dot separated) in a JSON object, creating intermediate objects.
pub fn set_path(root: &mut Value, path: &str, v: Value) -> Result<(), CliError> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| CliError::config(&parts[..i].join("."), "expected an object".to_string()))?;
        if i + 1 == parts.len() {
            obj.insert(key.to_string(), v);
            return Ok(());
        }
        cur = obj.entry(key.to_string()).or_insert_with(|| json!({}));
    }
    Ok(())
}

/// Deserializes with the failing field path in the error.
pub fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(if path == "." { "<root>" } else { &path }, e.into_inner().to_string())
    })
}

impl RunConfig {
    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: &str, msg: String| Err(CliError::config(path, msg));
        let (n, size) = (self.grid.n, self.grid.size);
        if !(1..=MAX_DIM).contains(&n) {
            return bad("grid.n", format!("dimension must be in 1..={MAX_DIM}, got {n}"));
        }
        if size < 4 || !size.is_power_of_two() {
            return bad("grid.N", format!("must be a power of two >= 4, got {size}"));
        }
        if (size as u128).pow(n as u32) > MAX_LATTICE_POINTS as u128 {
            return bad("grid.N", format!("{size}^{n} lattice points exceed {MAX_LATTICE_POINTS}"));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad("T", format!("must be positive and finite, got {}", self.t_final));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.t_final) {
            return bad("dt", format!("must be in (0, T], got {}", self.dt));
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return bad("mass", format!("must be finite and non-negative, got {}", self.mass));
        }
        if self.cadence == 0 {
            return bad("cadence", "must be at least 1".to_string());
        }
        let e = self.exponents;
        for (name, v) in [("s", e.s), ("r", e.r), ("epsilon", e.epsilon)] {
            if !v.is_finite() {
                return bad(&format!("exponents.{name}"), format!("must be finite, got {v}"));
            }
        }
        match &self.data {
            DataSource::Random(RandomData { amplitude, width, electric, magnetic, .. }) => {
                for (name, v) in [("amplitude", amplitude), ("electric", electric), ("magnetic", magnetic)] {
                    if !(v.is_finite() && *v >= 0.0) {
                        return bad(&format!("data.random.{name}"), format!("must be finite and non-negative, got {v}"));
                    }
                }
                if !(width.is_finite() && *width > 0.0) {
                    return bad("data.random.width", format!("must be positive, got {width}"));
                }
            }
            DataSource::Snapshot(_) => {}
            DataSource::Preset(name) => match name.as_str() {
                "zero" => {}
                "smalldata-n2" if n == 2 => {}
                "smalldata-n2" => return bad("data.preset", format!("preset smalldata-n2 needs grid.n = 2, got {n}")),
                other => return Err(unknown_preset("data.preset", other)),
            },
        }
        Ok(())
    }

    /// Violated well-posedness hypotheses for the configured exponents.
    pub fn exponent_violations(&self) -> Vec<String> {
        SobolevExponents::from(self.exponents).violations(self.grid.n)
    }
}
