//! `mkg run`: build data, evolve, write diagnostics and snapshots.

use std::path::Path;

use mkg_core::dynamics::{evolve_observed, FaradayTrack};
use mkg_core::initdata::{load_data, save_data, sidecar_path};
use mkg_core::random::random_field;
use mkg_core::snapshot::save_snapshot;
use mkg_core::{
    build_data, BuildOptions, EvolveOptions, FaradaySeed, InitialData, MkgError, SchemeSpec, Series,
    SpectralScalar, TorusGrid,
};
use serde_json::json;

use crate::config::{smalldata, DataSource, RandomData, RunConfig};
use crate::error::{CliError, EXIT_BLOW_UP};
use crate::output::write_manifest;

pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const DIAGNOSTICS_JSON: &str = "diagnostics.json";
pub const SNAPSHOT_INITIAL: &str = "snapshot_initial.mkgs";
pub const SNAPSHOT_FINAL: &str = "snapshot_final.mkgs";
pub const SNAPSHOT_LAST: &str = "snapshot_last.mkgs";

fn random_data(g: TorusGrid, mass: f64, r: &RandomData) -> Result<InitialData, CliError> {
    let RandomData { seed, amplitude, width, electric, magnetic } = *r;
    let phi0 = random_field(g, seed, false, width).scaled_real(amplitude);
    let phi1 = random_field(g, seed + 1, false, width).scaled_real(amplitude);
    let faraday = if magnetic > 0.0 {
        FaradaySeed::Random { seed: seed + 2, amplitude: magnetic }
    } else {
        FaradaySeed::Zero
    };
    let opts = BuildOptions { mass, width, electric: (electric > 0.0).then_some((seed + 3, electric)) };
    Ok(build_data(&phi0, &phi1, &faraday, &opts)?)
}

/// Initial data described by the configuration.
pub fn initial_data(cfg: &RunConfig) -> Result<InitialData, CliError> {
    let g = TorusGrid::new(cfg.grid.n, cfg.grid.size)?;
    let from_random = |r: &RandomData| random_data(g, cfg.mass, r);
    match &cfg.data {
        DataSource::Preset(name) if name == "zero" => {
            let z = SpectralScalar::zeros(g, false);
            let opts = BuildOptions { mass: cfg.mass, electric: None, ..Default::default() };
            Ok(build_data(&z, &z, &FaradaySeed::Zero, &opts)?)
        }
        DataSource::Preset(_) => from_random(&smalldata()),
        DataSource::Random(r) => from_random(r),
        DataSource::Snapshot(path) => {
            let mut data =
                load_data(path).map_err(|e| CliError::config("data.snapshot", format!("{}: {e}", path.display())))?;
            let sg = data.grid();
            if sg.dim() != g.dim() || sg.size() != g.size() {
                return Err(CliError::config(
                    "data.snapshot",
                    format!("snapshot grid n={} N={} differs from the configured grid", sg.dim(), sg.size()),
                ));
            }
            data.mass = cfg.mass;
            Ok(data)
        }
    }
}

fn write_series(dir: &Path, series: &Series, files: &mut Vec<String>) -> Result<(), CliError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(DIAGNOSTICS_CSV))?);
    series.write_csv(&mut f)?;
    std::fs::write(dir.join(DIAGNOSTICS_JSON), series.to_json()?)?;
    files.push(DIAGNOSTICS_CSV.into());
    files.push(DIAGNOSTICS_JSON.into());
    Ok(())
}

pub fn cmd_run(cfg: &RunConfig, strict_exponents: bool) -> Result<(), CliError> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let violations = cfg.exponent_violations();
    if !violations.is_empty() {
        let msg = format!(
            "exponents (s, r, epsilon) = ({}, {}, {}) violate for n = {}: {}",
            cfg.exponents.s,
            cfg.exponents.r,
            cfg.exponents.epsilon,
            cfg.grid.n,
            violations.join("; ")
        );
        if strict_exponents {
            return Err(CliError::config("exponents", msg));
        }
        eprintln!("warning: {msg}");
        warnings.push(msg);
    }

    let data = initial_data(cfg)?;
    let dir = cfg.output_dir.as_path();
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let initial = dir.join(SNAPSHOT_INITIAL);
    save_data(&initial, &data)?;
    files.push(SNAPSHOT_INITIAL.into());
    files.push(sidecar_path(Path::new(SNAPSHOT_INITIAL)).display().to_string());

    let scheme = SchemeSpec::new(cfg.scheme, cfg.dt);
    let opts = EvolveOptions {
        cadence: cfg.cadence,
        exponents: cfg.exponents.into(),
        faraday: FaradayTrack::Coevolve,
    };
    let every = cfg.snapshot_every;
    let mut snapshots = Vec::new();
    let result = evolve_observed(&data, cfg.t_final, &scheme, &opts, &mut |k, s, _| {
        if every > 0 && k > 0 && k % every == 0 {
            let name = format!("snapshot_{k:08}.mkgs");
            save_snapshot(dir.join(&name), s)?;
            snapshots.push(name);
        }
        Ok(())
    });
    files.extend(snapshots);

    let data_report = json!({
        "constraint_residuals": data.residuals,
        "dropped_charge": data.dropped_charge,
    });
    match result {
        Ok(evo) => {
            write_series(dir, &evo.series, &mut files)?;
            save_snapshot(dir.join(SNAPSHOT_FINAL), &evo.final_state)?;
            files.push(SNAPSHOT_FINAL.into());
            let last = evo.series.last().expect("series has the initial record");
            write_manifest(
                dir,
                "run",
                cfg,
                "completed",
                &files,
                &warnings,
                json!({ "steps": evo.steps, "dt_used": evo.dt, "initial_data": data_report, "final": last }),
            )?;
            println!("completed {} steps (dt = {}) to T = {}", evo.steps, evo.dt, cfg.t_final);
            for (k, v) in &last.values {
                println!("  {k:<22} {v:.6e}");
            }
            println!("outputs in {}", dir.display());
            Ok(())
        }
        Err(fail) => {
            write_series(dir, &fail.series, &mut files)?;
            if let Some(s) = &fail.last_state {
                save_snapshot(dir.join(SNAPSHOT_LAST), s)?;
                files.push(SNAPSHOT_LAST.into());
            }
            let blow_up = matches!(fail.error, MkgError::BlowUp { .. });
            let status = if blow_up { "blow_up" } else { "failed" };
            write_manifest(
                dir,
                "run",
                cfg,
                status,
                &files,
                &warnings,
                json!({ "error": fail.error.to_string(), "initial_data": data_report }),
            )?;
            let code = if blow_up { EXIT_BLOW_UP } else { crate::error::EXIT_CONFIG };
            Err(CliError::new(code, format!("{status}: {}; partial outputs in {}", fail.error, dir.display())))
        }
    }
}
