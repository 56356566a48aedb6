//! Time-ordered integration of the Hubbard Schrödinger equation.
//!
//! Each step applies `exp(-i H(t + dt/2) dt)` exactly through the
//! eigendecomposition of the midpoint matrix, which is unitary and second
//! order in `dt` for a time-dependent `H`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{apply_unitary_step, sorted_eigh};

use super::model::HubbardSystem;

/// Largest tolerated deviation of the norm from one over a run.
pub const NORM_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PopulationSeries {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    /// `populations[s][k]` is the weight of basis state `k` at `times[s]`.
    pub populations: Vec<Vec<f64>>,
    pub steps: usize,
    pub dt: f64,
    pub norm_drift: f64,
}

impl PopulationSeries {
    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Writes `t, <label>...` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        let mut header = vec!["t".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (t, row) in self.times.iter().zip(&self.populations) {
            let mut rec = vec![format!("{t:?}")];
            rec.extend(row.iter().map(|p| format!("{p:?}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialization(format!("{other:?}")),
    }
}

/// Evolves `psi0` (real, normalised) over the whole protocol.
///
/// Populations are recorded at `t = 0`, every `record_every` steps, and at
/// `t = T`.
pub fn evolve_hubbard(
    system: &HubbardSystem,
    psi0: &[f64],
    dt: f64,
    record_every: usize,
) -> Result<PopulationSeries> {
    let dim = system.dim();
    if psi0.len() != dim {
        return Err(Error::Contract(format!(
            "initial state has {} amplitudes, model has {dim} states",
            psi0.len()
        )));
    }
    let norm0: f64 = psi0.iter().map(|v| v * v).sum();
    if (norm0 - 1.0).abs() > NORM_GUARD {
        return Err(Error::Contract(format!("initial state norm {norm0} is not 1")));
    }
    let total = system.trajectory.total_time;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("invalid time step {dt}")));
    }
    let steps = (total / dt).ceil().max(1.0) as usize;
    let h = total / steps as f64;
    let every = record_every.max(1);

    let mut re = psi0.to_vec();
    let mut im = vec![0.0; dim];
    let pops = |re: &[f64], im: &[f64]| -> Vec<f64> {
        re.iter().zip(im).map(|(a, b)| a * a + b * b).collect()
    };
    let mut times = vec![0.0];
    let mut populations = vec![pops(&re, &im)];
    let mut drift: f64 = 0.0;
    for s in 0..steps {
        let mid = (s as f64 + 0.5) * h;
        let (vals, vecs) = sorted_eigh(&system.hamiltonian_at(mid)?)?;
        apply_unitary_step(&vals, &vecs, h, &mut re, &mut im);
        let norm: f64 = re.iter().chain(&im).map(|v| v * v).sum();
        drift = drift.max((norm - norm0).abs());
        if drift > NORM_GUARD {
            return Err(Error::StepSize(format!(
                "Hubbard norm drift {drift:e} exceeds {NORM_GUARD:e} at t = {}",
                (s + 1) as f64 * h
            )));
        }
        if (s + 1) % every == 0 || s + 1 == steps {
            times.push(if s + 1 == steps { total } else { (s + 1) as f64 * h });
            populations.push(pops(&re, &im));
        }
    }
    Ok(PopulationSeries {
        labels: system.labels(),
        times,
        populations,
        steps,
        dt: h,
        norm_drift: drift,
    })
}
