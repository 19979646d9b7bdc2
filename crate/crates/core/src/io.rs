//! On-disk formats: a flat binary array layout for grid fields plus a
//! JSON manifest for coefficient-field directories.
//!
//! Binary layout (little-endian): magic `MGH1`, one dtype byte
//! (1 = complex128), one rank byte, `rank` × u64 dimensions, then the
//! row-major data as (re, im) f64 pairs.

use crate::compact::Backend;
use crate::euclid::{GridSpec, ScalarField, SpectralField};
use crate::motion::{PwField, SpectralPwField};
use crate::{c64, error::Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"MGH1";
const DTYPE_C128: u8 = 1;

/// Write a complex array with its dimensions.
pub fn write_array(path: &Path, dims: &[usize], values: &[C64]) -> Result<()> {
    let expect: usize = dims.iter().product();
    if expect != values.len() {
        return Err(Error::FieldData(format!(
            "dims {:?} expect {expect} values, got {}",
            dims,
            values.len()
        )));
    }
    let mut buf = Vec::with_capacity(6 + 8 * dims.len() + 16 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.push(DTYPE_C128);
    buf.push(dims.len() as u8);
    for d in dims {
        buf.extend_from_slice(&(*d as u64).to_le_bytes());
    }
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Read a complex array and its dimensions.
pub fn read_array(path: &Path) -> Result<(Vec<usize>, Vec<C64>)> {
    let mut raw = Vec::new();
    fs::File::open(path)?.read_to_end(&mut raw)?;
    if raw.len() < 6 || &raw[..4] != MAGIC {
        return Err(Error::FieldData("bad magic".into()));
    }
    if raw[4] != DTYPE_C128 {
        return Err(Error::FieldData(format!("unsupported dtype {}", raw[4])));
    }
    let rank = raw[5] as usize;
    let mut off = 6;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut b = [0u8; 8];
        b.copy_from_slice(&raw[off..off + 8]);
        dims.push(u64::from_le_bytes(b) as usize);
        off += 8;
    }
    let count: usize = dims.iter().product();
    if raw.len() != off + 16 * count {
        return Err(Error::FieldData(format!(
            "payload size {} does not match dims {:?}",
            raw.len() - off,
            dims
        )));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let mut re = [0u8; 8];
        let mut im = [0u8; 8];
        re.copy_from_slice(&raw[off..off + 8]);
        im.copy_from_slice(&raw[off + 8..off + 16]);
        values.push(c64(f64::from_le_bytes(re), f64::from_le_bytes(im)));
        off += 16;
    }
    Ok((dims, values))
}

fn grid_dims(grid: &GridSpec) -> Vec<usize> {
    vec![grid.samples; grid.n]
}

pub fn write_scalar_field(path: &Path, f: &ScalarField) -> Result<()> {
    write_array(path, &grid_dims(&f.grid), &f.values)
}

pub fn read_scalar_field(path: &Path, grid: GridSpec) -> Result<ScalarField> {
    let (dims, values) = read_array(path)?;
    if dims != grid_dims(&grid) {
        return Err(Error::FieldData(format!(
            "grid dims {:?} do not match file dims {dims:?}",
            grid_dims(&grid)
        )));
    }
    Ok(ScalarField { grid, values })
}

pub fn write_spectral_field(path: &Path, f: &SpectralField) -> Result<()> {
    write_array(path, &grid_dims(&f.grid), &f.values)
}

/// Which domain a serialized coefficient field lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldDomain {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockEntry {
    pub label: i32,
    pub degree: usize,
    pub file: String,
}

/// Manifest of a coefficient-field directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PwManifest {
    pub backend: String,
    pub cutoff: u32,
    pub grid: GridSpec,
    pub domain: FieldDomain,
    pub extendable: bool,
    pub blocks: Vec<BlockEntry>,
}

fn block_dims(grid: &GridSpec, degree: usize) -> Vec<usize> {
    let mut dims = vec![degree, degree];
    dims.extend(grid_dims(grid));
    dims
}

fn save_blocks(
    dir: &Path,
    backend: Backend,
    grid: GridSpec,
    cutoff: u32,
    domain: FieldDomain,
    extendable: bool,
    blocks: &std::collections::BTreeMap<i32, Vec<C64>>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for (label, values) in blocks {
        let pi = crate::compact::IrrepMeta::new(backend, *label)?;
        let file = format!("block_{label}.bin");
        write_array(&dir.join(&file), &block_dims(&grid, pi.degree), values)?;
        entries.push(BlockEntry {
            label: *label,
            degree: pi.degree,
            file,
        });
    }
    let manifest = PwManifest {
        backend: backend.name().to_string(),
        cutoff,
        grid,
        domain,
        extendable,
        blocks: entries,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

pub fn save_pw_field(dir: &Path, f: &PwField) -> Result<()> {
    save_blocks(
        dir,
        f.backend,
        f.grid,
        f.cutoff,
        FieldDomain::Physical,
        f.extendable,
        &f.blocks,
    )
}

pub fn save_spectral_pw_field(dir: &Path, f: &SpectralPwField) -> Result<()> {
    save_blocks(
        dir,
        f.backend,
        f.grid,
        f.cutoff,
        FieldDomain::Spectral,
        f.extendable,
        &f.blocks,
    )
}

fn load_manifest(dir: &Path) -> Result<PwManifest> {
    let raw = fs::read_to_string(dir.join("manifest.json"))?;
    Ok(serde_json::from_str(&raw)?)
}

fn load_blocks(
    dir: &Path,
    manifest: &PwManifest,
) -> Result<std::collections::BTreeMap<i32, Vec<C64>>> {
    let mut blocks = std::collections::BTreeMap::new();
    for entry in &manifest.blocks {
        let (dims, values) = read_array(&dir.join(&entry.file))?;
        if dims != block_dims(&manifest.grid, entry.degree) {
            return Err(Error::FieldData(format!(
                "block {} dims {dims:?} mismatch",
                entry.label
            )));
        }
        blocks.insert(entry.label, values);
    }
    Ok(blocks)
}

pub fn load_pw_field(dir: &Path) -> Result<PwField> {
    let manifest = load_manifest(dir)?;
    if manifest.domain != FieldDomain::Physical {
        return Err(Error::FieldData("expected a physical-domain field".into()));
    }
    let backend = Backend::parse(&manifest.backend)?;
    let mut out = PwField::empty(backend, manifest.grid, manifest.cutoff);
    out.extendable = manifest.extendable;
    out.blocks = load_blocks(dir, &manifest)?;
    Ok(out)
}

pub fn load_spectral_pw_field(dir: &Path) -> Result<SpectralPwField> {
    let manifest = load_manifest(dir)?;
    if manifest.domain != FieldDomain::Spectral {
        return Err(Error::FieldData("expected a spectral-domain field".into()));
    }
    let backend = Backend::parse(&manifest.backend)?;
    let mut out = SpectralPwField::empty(backend, manifest.grid, manifest.cutoff);
    out.extendable = manifest.extendable;
    out.blocks = load_blocks(dir, &manifest)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::quadrature;
    use crate::motion::analyze;

    #[test]
    fn array_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.bin");
        let values: Vec<C64> = (0..24).map(|i| c64(i as f64, -0.5 * i as f64)).collect();
        write_array(&path, &[2, 3, 4], &values).unwrap();
        let (dims, back) = read_array(&path).unwrap();
        assert_eq!(dims, vec![2, 3, 4]);
        assert_eq!(back, values);
    }

    #[test]
    fn rejects_corrupt_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(read_array(&path).is_err());
    }

    #[test]
    fn pw_field_roundtrip() {
        let grid = GridSpec::new(2, 8.0, 16).unwrap();
        let rule = quadrature(Backend::U1, 2);
        let f = analyze(grid, &rule, 2, |cell, k| {
            let x = grid.point(cell);
            let r2 = x[0] * x[0] + x[1] * x[1];
            let phi = crate::compact::rep_matrix(
                &crate::compact::IrrepMeta::new(Backend::U1, 1).unwrap(),
                k,
            )[0];
            c64((-r2 / 2.0).exp(), 0.0) * phi
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_pw_field(dir.path(), &f).unwrap();
        let back = load_pw_field(dir.path()).unwrap();
        assert_eq!(back.cutoff, f.cutoff);
        assert_eq!(back.grid, f.grid);
        assert_eq!(back.blocks, f.blocks);
        // Spectral loader refuses the physical manifest.
        assert!(load_spectral_pw_field(dir.path()).is_err());
    }
}
