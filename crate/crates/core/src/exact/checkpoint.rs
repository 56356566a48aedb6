//! Binary wave-function checkpoints with a JSON sidecar.
//!
//! Layout (little endian): magic `SAPCKPT1`, `u64` points per axis, `f64`
//! `x_min`, `f64` `x_max`, `f64` time, then `n^2` pairs `(re, im)` of `f64`
//! in row-major order. The sidecar `<file>.json` records the scenario hash
//! so a resumed run can refuse a checkpoint from a different scenario.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

use super::propagate::WaveFunction2;

pub const MAGIC: &[u8; 8] = b"SAPCKPT1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub format: String,
    pub scenario_hash: String,
    pub time: f64,
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub energy: f64,
    pub total_time: f64,
}

/// Where and how often a long propagation writes checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointPolicy {
    pub dir: PathBuf,
    /// Time between checkpoints, in oscillator units.
    pub interval: f64,
    /// File stem, unique per run within `dir`.
    pub tag: String,
    pub scenario_hash: String,
}

impl CheckpointPolicy {
    pub fn data_path(&self) -> PathBuf {
        self.dir.join(format!("{}.ckpt", self.tag))
    }

    pub fn meta_path(&self) -> PathBuf {
        self.dir.join(format!("{}.ckpt.json", self.tag))
    }
}

pub fn write(path: &Path, psi: &WaveFunction2, meta: &CheckpointMeta) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = path.with_extension("ckpt.tmp");
    {
        let f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut w = BufWriter::new(f);
        let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(&tmp, e));
        put(MAGIC)?;
        put(&(psi.grid.n() as u64).to_le_bytes())?;
        put(&psi.grid.x_min().to_le_bytes())?;
        put(&psi.grid.x_max().to_le_bytes())?;
        put(&psi.time.to_le_bytes())?;
        for z in &psi.amplitudes {
            put(&z.re.to_le_bytes())?;
            put(&z.im.to_le_bytes())?;
        }
        w.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    let meta_path = sidecar(path);
    let json = serde_json::to_string_pretty(meta)?;
    fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(WaveFunction2, CheckpointMeta)> {
    let meta_path = sidecar(path);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: CheckpointMeta = serde_json::from_str(&meta_text)?;
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(f);
    let mut word = [0u8; 8];
    let mut take = |buf: &mut [u8; 8]| r.read_exact(buf).map_err(|e| Error::io(path, e));
    take(&mut word)?;
    if &word != MAGIC {
        return Err(Error::Serialization(format!("{} is not a checkpoint file", path.display())));
    }
    take(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    take(&mut word)?;
    let x_min = f64::from_le_bytes(word);
    take(&mut word)?;
    let x_max = f64::from_le_bytes(word);
    take(&mut word)?;
    let time = f64::from_le_bytes(word);
    let grid = Grid2D::new(x_min, x_max, n)
        .map_err(|e| Error::Serialization(format!("corrupt checkpoint grid: {e}")))?;
    let mut amplitudes = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        take(&mut word)?;
        let re = f64::from_le_bytes(word);
        take(&mut word)?;
        let im = f64::from_le_bytes(word);
        amplitudes.push(Complex64::new(re, im));
    }
    Ok((
        WaveFunction2 {
            grid,
            time,
            amplitudes,
        },
        meta,
    ))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}
