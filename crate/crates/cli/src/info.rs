//! `mkg info`: grid facts and exponent admissibility.

use mkg_core::{SobolevExponents, TorusGrid};

use crate::error::CliError;

pub fn cmd_info(dim: usize, size: usize, exps: SobolevExponents) -> Result<(), CliError> {
    let g = TorusGrid::new(dim, size).map_err(|e| CliError::config("grid", e.to_string()))?;
    let cutoff = g.dealias_cutoff();
    let kept_per_axis = (0..size).filter(|&i| (g.freq(i).abs() as f64) <= cutoff).count();
    println!("grid");
    println!("  dimension n          {dim}");
    println!("  points per axis N    {size}");
    println!("  lattice points       {}", g.len());
    println!("  spacing              {:.6e}", g.spacing());
    println!("  dealias cutoff       |k_i| <= {cutoff:.4}");
    println!("  retained modes       {}", kept_per_axis.pow(dim as u32));
    println!("  field storage        {:.3} MiB per complex field", (g.len() * 16) as f64 / (1u64 << 20) as f64);

    let n = dim as f64;
    println!("exponents (s, r, epsilon) = ({}, {}, {})", exps.s, exps.r, exps.epsilon);
    println!("  threshold s > n/2 - 5/6 = {:.6}", n / 2.0 - 5.0 / 6.0);
    let violations = exps.violations(dim);
    if violations.is_empty() {
        println!("  admissible: every hypothesis holds");
    } else {
        println!("  not admissible, violated:");
        for v in &violations {
            println!("    {v}");
        }
    }
    Ok(())
}
