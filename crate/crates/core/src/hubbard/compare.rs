//! Comparison of Hubbard levels with the exact low-lying spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::model::ModelKind;

/// Index of the first exact level a Hubbard model describes. The Bose model
/// covers the lowest six states; the Fermi model has no separated-atom
/// states, whose three levels sit below its bands.
pub fn exact_offset(kind: ModelKind) -> usize {
    match kind {
        ModelKind::Bose => 0,
        ModelKind::Fermi => 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDeviation {
    /// Largest `|E_hubbard - E_exact|` over all slices and levels.
    pub max_deviation: f64,
    pub time: f64,
    pub level: usize,
}

/// Compares sorted Hubbard levels with the matching sorted exact levels,
/// slice by slice.
pub fn band_deviation(kind: ModelKind, times: &[f64], hubbard: &[Vec<f64>], exact: &[Vec<f64>]) -> Result<BandDeviation> {
    if hubbard.len() != exact.len() || times.len() != exact.len() || exact.is_empty() {
        return Err(Error::Contract("spectra must share the same non-empty slice set".into()));
    }
    let off = exact_offset(kind);
    let mut worst = BandDeviation {
        max_deviation: 0.0,
        time: times[0],
        level: 0,
    };
    for ((&t, h), e) in times.iter().zip(hubbard).zip(exact) {
        if e.len() < off + h.len() {
            return Err(Error::Contract(format!(
                "need {} exact levels to compare, have {}",
                off + h.len(),
                e.len()
            )));
        }
        let mut hs = h.clone();
        hs.sort_by(f64::total_cmp);
        let mut es = e.clone();
        es.sort_by(f64::total_cmp);
        for (l, (a, b)) in hs.iter().zip(&es[off..]).enumerate() {
            let d = (a - b).abs();
            if d > worst.max_deviation {
                worst = BandDeviation {
                    max_deviation: d,
                    time: t,
                    level: l,
                };
            }
        }
    }
    Ok(worst)
}
