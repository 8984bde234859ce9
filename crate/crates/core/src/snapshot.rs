//! `MKGS` binary snapshots.
//!
//! Layout (little-endian): magic `b"MKGS"`, version `u32 = 1`, `n: u32`,
//! `N: u32`, `m: f64`, `t: f64`, then `phi, phi_t, a[0..=n], a_t[0..=n]`, each
//! as `N^n` interleaved `(re, im)` `f64` pairs in coefficient storage order
//! (row-major over axes, FFT frequency order along each axis).

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{MkgError, Result};
use crate::fields::MkgState;
use crate::grid::TorusGrid;
use crate::spectral::SpectralScalar;

pub const MAGIC: &[u8; 4] = b"MKGS";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(mut w: W, state: &MkgState) -> Result<()> {
    let grid = state.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.size() as u32).to_le_bytes())?;
    w.write_all(&state.mass.to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.len() * 16);
    for f in state.fields() {
        buf.clear();
        for c in f.coeffs() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Read a snapshot; the grid gets the default dealiasing fraction.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<MkgState> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(MkgError::Snapshot("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(MkgError::Snapshot(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let size = read_u32(&mut r)? as usize;
    let grid = TorusGrid::new(dim, size)?;
    let mass = read_f64(&mut r)?;
    let t = read_f64(&mut r)?;
    let mut read_field = |is_real: bool| -> Result<SpectralScalar> {
        let mut bytes = vec![0u8; grid.len() * 16];
        r.read_exact(&mut bytes)?;
        let coeffs = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        SpectralScalar::from_coeffs(grid, coeffs, is_real)
    };
    let phi = read_field(false)?;
    let phi_t = read_field(false)?;
    let a = (0..=dim).map(|_| read_field(true)).collect::<Result<Vec<_>>>()?;
    let a_t = (0..=dim).map(|_| read_field(true)).collect::<Result<Vec<_>>>()?;
    let state = MkgState {
        t,
        phi,
        phi_t,
        a,
        a_t,
        mass,
    };
    state.validate()?;
    Ok(state)
}

pub fn save_snapshot(path: impl AsRef<Path>, state: &MkgState) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(&mut w, state)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<MkgState> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}
