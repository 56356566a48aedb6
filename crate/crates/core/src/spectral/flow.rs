//! Continuity tracking of eigenpairs along a protocol.
//!
//! Consecutive slices are matched through their overlap matrix. Eigenvalues
//! closer than `cluster_tol` form a cluster whose eigenvectors are only
//! defined up to a rotation; each cluster is rotated (polar alignment) onto
//! the previous tracks assigned to it, so that tracks stay smooth through
//! degeneracies. Signs are fixed by making each track's overlap with its
//! predecessor positive.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::dot;
use crate::linalg::lowdin;

/// Eigenpairs at one instant as seen by the tracker.
#[derive(Debug, Clone)]
pub struct SliceData {
    pub time: f64,
    /// Ascending energies.
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Anything that can diagonalise the Hamiltonian at a given time.
pub trait SliceSource {
    fn slice(&mut self, t: f64) -> Result<SliceData>;

    /// Weight of the inner product, `<a|b> = weight * sum a_k b_k`.
    fn weight(&self) -> f64 {
        1.0
    }
}

impl<F: FnMut(f64) -> Result<SliceData>> SliceSource for F {
    fn slice(&mut self, t: f64) -> Result<SliceData> {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandLabel {
    /// Two atoms in different wells, energy near 1.
    Separated,
    /// Both atoms in one well, energy near `E_g`.
    Pair,
    /// One atom in the first excited level, energy near 2.
    Excited,
    Unassigned,
}

/// A step at which continuation was not clean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationEvent {
    pub time: f64,
    pub track: usize,
    /// Overlap of the track with its predecessor.
    pub overlap: f64,
    /// Runner-up weight when the assignment was ambiguous.
    pub competing: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralFlow {
    pub times: Vec<f64>,
    /// `energies[s][k]`: energy of track `k` at `times[s]`.
    pub energies: Vec<Vec<f64>>,
    /// `overlaps[s][(a, b)] = <a(t_s)|b(t_{s+1})>` between gauge-aligned tracks.
    pub overlaps: Vec<DMatrix<f64>>,
    pub labels: Vec<BandLabel>,
    pub events: Vec<ContinuationEvent>,
    #[serde(skip)]
    pub first_vectors: Vec<Vec<f64>>,
    #[serde(skip)]
    pub last_vectors: Vec<Vec<f64>>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerSettings {
    /// Eigenvalues closer than this are treated as degenerate.
    pub cluster_tol: f64,
    /// A continuation with overlap below this is logged.
    pub warn_overlap: f64,
    /// Assignments whose two best weights differ by less than this are logged.
    pub ambiguity: f64,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        TrackerSettings {
            cluster_tol: 1e-6,
            warn_overlap: 0.5,
            ambiguity: 1e-3,
        }
    }
}

/// Incremental tracker: feed slices in time order.
#[derive(Debug, Clone)]
pub struct FlowBuilder {
    settings: TrackerSettings,
    weight: f64,
    flow: SpectralFlow,
    current: Vec<Vec<f64>>,
}

/// Result of matching one slice to the current tracks, not yet committed.
#[derive(Debug, Clone)]
pub struct Continuation {
    pub slice: SliceData,
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub overlap: DMatrix<f64>,
    pub events: Vec<ContinuationEvent>,
}

impl Continuation {
    /// Overlap of each track with its own predecessor.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.overlap.nrows()).map(|k| self.overlap[(k, k)]).collect()
    }
}

fn clusters(energies: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &e) in energies.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (e - energies[*c.last().unwrap()]).abs() < tol => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Completes orthonormal columns of an `n x m` matrix to an `n x n` one.
fn complete_basis(q: DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    let mut cols: Vec<nalgebra::DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::from_fn(n, |r, _| if r == e { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for c in &cols {
                let p = c.dot(&v);
                v -= c * p;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Matches `refs` (orthonormal, count `r`) to the eigenvectors of `slice`.
///
/// Returns, for each of the `k` slice states, a track index, the rotated
/// vectors in track order, and the `r x k` overlap matrix.
fn align(
    refs: &[Vec<f64>],
    slice: &SliceData,
    weight: f64,
    settings: &TrackerSettings,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, DMatrix<f64>, Vec<ContinuationEvent>)> {
    let k = slice.energies.len();
    let r = refs.len();
    if slice.vectors.len() != k {
        return Err(Error::Contract(format!(
            "slice at t = {} has {} energies but {} vectors",
            slice.time,
            k,
            slice.vectors.len()
        )));
    }
    if r > k {
        return Err(Error::Contract(format!("{r} references exceed the {k} computed states")));
    }
    let raw = DMatrix::from_fn(r, k, |a, b| weight * dot(&refs[a], &slice.vectors[b]));
    let groups = clusters(&slice.energies, settings.cluster_tol);

    // Greedy assignment of references to clusters by captured weight.
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (ci, c) in groups.iter().enumerate() {
        for a in 0..r {
            let w: f64 = c.iter().map(|&b| raw[(a, b)].powi(2)).sum();
            cand.push((w, a, ci));
        }
    }
    cand.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut ref_taken = vec![false; r];
    let mut capacity: Vec<usize> = groups.iter().map(Vec::len).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    let mut best_w = vec![0.0f64; r];
    let mut second_w = vec![0.0f64; r];
    for &(w, a, _) in &cand {
        if w > best_w[a] {
            second_w[a] = best_w[a];
            best_w[a] = w;
        } else if w > second_w[a] {
            second_w[a] = w;
        }
    }
    for &(_, a, ci) in &cand {
        if ref_taken[a] || capacity[ci] == 0 {
            continue;
        }
        ref_taken[a] = true;
        capacity[ci] -= 1;
        members[ci].push(a);
    }

    // Rotate each cluster onto its references; leftover directions become
    // new tracks appended after the references.
    let dim = slice.vectors[0].len();
    let mut vectors: Vec<Option<Vec<f64>>> = vec![None; k];
    let mut energies = vec![f64::NAN; k];
    let mut next_free = r;
    for (ci, c) in groups.iter().enumerate() {
        let mut refs_here = members[ci].clone();
        refs_here.sort_unstable();
        let m = refs_here.len();
        let rot = if c.len() == 1 {
            DMatrix::from_element(1, 1, 1.0)
        } else if m == 0 {
            DMatrix::identity(c.len(), c.len())
        } else {
            // Columns of M^T (|c| x m), polar factor gives best-matching frame.
            let mt = DMatrix::from_fn(c.len(), m, |i, a| raw[(refs_here[a], c[i])]);
            let q = if mt.norm() > 1e-12 {
                lowdin(&mt).unwrap_or_else(|_| DMatrix::identity(c.len(), m))
            } else {
                DMatrix::identity(c.len(), m)
            };
            complete_basis(q)
        };
        // Energies inside a cluster: hand out the sorted values in order of
        // the Rayleigh quotients of the rotated vectors.
        let quot: Vec<f64> = (0..c.len())
            .map(|col| (0..c.len()).map(|i| rot[(i, col)].powi(2) * slice.energies[c[i]]).sum())
            .collect();
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.sort_by(|&x, &y| quot[x].total_cmp(&quot[y]));
        let mut sorted_e: Vec<f64> = c.iter().map(|&i| slice.energies[i]).collect();
        sorted_e.sort_by(f64::total_cmp);
        let mut col_energy = vec![0.0; c.len()];
        for (rank, &col) in order.iter().enumerate() {
            col_energy[col] = sorted_e[rank];
        }
        for col in 0..c.len() {
            let track = if col < m {
                refs_here[col]
            } else {
                next_free += 1;
                next_free - 1
            };
            let mut v = vec![0.0; dim];
            if c.len() == 1 {
                v.copy_from_slice(&slice.vectors[c[0]]);
            } else {
                for (i, &b) in c.iter().enumerate() {
                    let w = rot[(i, col)];
                    if w != 0.0 {
                        for (vi, si) in v.iter_mut().zip(&slice.vectors[b]) {
                            *vi += w * si;
                        }
                    }
                }
            }
            vectors[track] = Some(v);
            energies[track] = col_energy[col];
        }
    }
    let mut vectors: Vec<Vec<f64>> = vectors
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::Numerical("track assignment left a gap".into())))
        .collect::<Result<_>>()?;

    let mut overlap = DMatrix::from_fn(r, k, |a, b| weight * dot(&refs[a], &vectors[b]));
    for t in 0..r {
        if overlap[(t, t)] < 0.0 {
            for x in vectors[t].iter_mut() {
                *x = -*x;
            }
            for a in 0..r {
                overlap[(a, t)] = -overlap[(a, t)];
            }
        }
    }
    let mut events = Vec::new();
    for t in 0..r {
        let ov = overlap[(t, t)];
        let ambiguous = best_w[t] - second_w[t] < settings.ambiguity;
        if ov < settings.warn_overlap || ambiguous {
            events.push(ContinuationEvent {
                time: slice.time,
                track: t,
                overlap: ov,
                competing: ambiguous.then_some(second_w[t]),
            });
        }
    }
    Ok((energies, vectors, overlap, events))
}

impl FlowBuilder {
    /// Starts a flow at `first`. With `references`, degenerate clusters of the
    /// first slice are rotated onto them and track `a` starts as the state
    /// closest to reference `a`.
    pub fn new(
        first: SliceData,
        weight: f64,
        references: Option<&[Vec<f64>]>,
        settings: TrackerSettings,
    ) -> Result<Self> {
        let k = first.energies.len();
        if k == 0 {
            return Err(Error::Contract("empty first slice".into()));
        }
        let (energies, vectors, events) = match references {
            Some(refs) => {
                let (e, v, _, ev) = align(refs, &first, weight, &settings)?;
                (e, v, ev)
            }
            None => (first.energies.clone(), first.vectors.clone(), Vec::new()),
        };
        let flow = SpectralFlow {
            times: vec![first.time],
            energies: vec![energies],
            overlaps: Vec::new(),
            labels: vec![BandLabel::Unassigned; k],
            events,
            first_vectors: vectors.clone(),
            last_vectors: Vec::new(),
            weight,
        };
        Ok(FlowBuilder {
            settings,
            weight,
            flow,
            current: vectors,
        })
    }

    pub fn time(&self) -> f64 {
        *self.flow.times.last().unwrap()
    }

    pub fn current_vectors(&self) -> &[Vec<f64>] {
        &self.current
    }

    pub fn current_energies(&self) -> &[f64] {
        self.flow.energies.last().unwrap()
    }

    /// Matches a slice against the current tracks without committing it.
    pub fn continuation(&self, slice: SliceData) -> Result<Continuation> {
        if slice.energies.len() != self.current.len() {
            return Err(Error::Contract(format!(
                "slice at t = {} has {} states, flow tracks {}",
                slice.time,
                slice.energies.len(),
                self.current.len()
            )));
        }
        let (energies, vectors, overlap, events) = align(&self.current, &slice, self.weight, &self.settings)?;
        Ok(Continuation {
            slice,
            energies,
            vectors,
            overlap,
            events,
        })
    }

    pub fn commit(&mut self, c: Continuation) {
        self.flow.times.push(c.slice.time);
        self.flow.energies.push(c.energies);
        self.flow.overlaps.push(c.overlap);
        self.flow.events.extend(c.events);
        self.current = c.vectors;
    }

    pub fn push(&mut self, slice: SliceData) -> Result<()> {
        let c = self.continuation(slice)?;
        self.commit(c);
        Ok(())
    }

    pub fn finish(mut self) -> SpectralFlow {
        self.flow.last_vectors = self.current;
        self.flow
    }
}

/// Tracks a fixed sequence of slices.
pub fn track_bands(slices: Vec<SliceData>, weight: f64, references: Option<&[Vec<f64>]>) -> Result<SpectralFlow> {
    if slices.len() < 2 {
        return Err(Error::Contract("band tracking needs at least two slices".into()));
    }
    let mut it = slices.into_iter();
    let mut b = FlowBuilder::new(it.next().unwrap(), weight, references, TrackerSettings::default())?;
    for s in it {
        b.push(s)?;
    }
    Ok(b.finish())
}

/// Step control for [`build_adaptive_flow`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSettings {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// A step is accepted when every gated track keeps overlap `>= 1 - epsilon`
    /// with its predecessor.
    pub epsilon: f64,
    /// Tracks whose overlap gates the step; all tracks when empty.
    pub gate: Vec<usize>,
    /// Tracks whose energy ordering against every other track must not flip
    /// across a step. A flip means a crossing was stepped over; the step is
    /// refined until the crossing is resolved as avoided or both gaps drop
    /// below `crossing_floor`.
    pub resolve: Vec<usize>,
    pub crossing_floor: f64,
    pub tracker: TrackerSettings,
}

impl AdaptiveSettings {
    pub fn for_span(span: f64) -> Self {
        AdaptiveSettings {
            initial_step: span / 40.0,
            max_step: span / 40.0,
            min_step: span * 1e-7,
            epsilon: 0.02,
            gate: Vec::new(),
            resolve: Vec::new(),
            crossing_floor: 1e-5,
            tracker: TrackerSettings::default(),
        }
    }
}

/// Builds a flow on `[t0, t1]`, refining the step wherever tracked states
/// rotate quickly.
pub fn build_adaptive_flow<S: SliceSource + ?Sized>(
    source: &mut S,
    t0: f64,
    t1: f64,
    references: Option<&[Vec<f64>]>,
    settings: &AdaptiveSettings,
) -> Result<SpectralFlow> {
    if !(t1 > t0) {
        return Err(Error::Contract(format!("empty flow interval [{t0}, {t1}]")));
    }
    if !(settings.min_step > 0.0 && settings.min_step <= settings.initial_step && settings.max_step >= settings.initial_step)
    {
        return Err(Error::Config("adaptive flow needs 0 < min_step <= initial_step <= max_step".into()));
    }
    let weight = source.weight();
    let first = source.slice(t0)?;
    let mut b = FlowBuilder::new(first, weight, references, settings.tracker)?;
    let k = b.current.len();
    let gate: Vec<usize> = if settings.gate.is_empty() {
        (0..k).collect()
    } else {
        settings.gate.clone()
    };
    if gate.iter().chain(&settings.resolve).any(|&g| g >= k) {
        return Err(Error::Config(format!("track index out of range (flow has {k} tracks)")));
    }
    let mut h = settings.initial_step;
    let span = t1 - t0;
    while b.time() < t1 {
        let t = b.time();
        let last = t + h >= t1 - 1e-12 * span;
        let target = if last { t1 } else { t + h };
        let c = b.continuation(source.slice(target)?)?;
        let diag = c.diagonal();
        let worst = gate.iter().map(|&g| diag[g]).fold(f64::INFINITY, f64::min);
        let before = b.current_energies();
        let flipped = settings.resolve.iter().any(|&r| {
            (0..k).filter(|&o| o != r).any(|o| {
                let d0 = before[r] - before[o];
                let d1 = c.energies[r] - c.energies[o];
                d0 * d1 < 0.0 && d0.abs().min(d1.abs()) > settings.crossing_floor
            })
        });
        if (worst < 1.0 - settings.epsilon || flipped) && h > settings.min_step {
            h = (h * 0.5).max(settings.min_step);
            continue;
        }
        b.commit(c);
        if worst > 1.0 - 0.25 * settings.epsilon {
            h = (h * 1.5).min(settings.max_step);
        }
    }
    Ok(b.finish())
}

impl SpectralFlow {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn track_count(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    pub fn track(&self, k: usize) -> Vec<f64> {
        self.energies.iter().map(|e| e[k]).collect()
    }

    /// Labels tracks by their energy at the first slice: the nearest of
    /// `1`, `pair_energy` and `2` within `tol`.
    pub fn label_bands(&mut self, pair_energy: f64, tol: f64) {
        let first = &self.energies[0];
        self.labels = first
            .iter()
            .map(|&e| {
                let cands = [
                    (BandLabel::Separated, 1.0),
                    (BandLabel::Pair, pair_energy),
                    (BandLabel::Excited, 2.0),
                ];
                cands
                    .iter()
                    .map(|&(l, c)| (l, (e - c).abs()))
                    .filter(|&(_, d)| d < tol)
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map_or(BandLabel::Unassigned, |x| x.0)
            })
            .collect();
    }

    pub fn tracks_in(&self, label: BandLabel) -> Vec<usize> {
        (0..self.labels.len()).filter(|&k| self.labels[k] == label).collect()
    }

    /// Same flow for a protocol of duration `new_total`, when the flow was
    /// built for `old_total` and energies depend only on `t / T`.
    pub fn rescaled(&self, old_total: f64, new_total: f64) -> Result<SpectralFlow> {
        if !(old_total > 0.0 && new_total > 0.0) {
            return Err(Error::Contract("rescaling needs positive durations".into()));
        }
        let f = new_total / old_total;
        let mut out = self.clone();
        out.times.iter_mut().for_each(|t| *t *= f);
        out.events.iter_mut().for_each(|e| e.time *= f);
        Ok(out)
    }

    /// Writes `t, E_0, E_1, ...` rows.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| crate::hubbard::evolve::csv_error(path, e))?;
        let mut header = vec!["t".to_string()];
        header.extend((0..self.track_count()).map(|k| format!("E{k}")));
        w.write_record(&header)?;
        for (t, e) in self.times.iter().zip(&self.energies) {
            let mut rec = vec![format!("{t:?}")];
            rec.extend(e.iter().map(|x| format!("{x:?}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sorted_eigh;

    fn two_level(t: f64, delta: f64) -> SliceData {
        let m = DMatrix::from_row_slice(2, 2, &[t / 2.0, delta, delta, -t / 2.0]);
        let (e, v) = sorted_eigh(&m).unwrap();
        SliceData {
            time: t,
            energies: e,
            vectors: (0..2).map(|c| v.column(c).iter().copied().collect()).collect(),
        }
    }

    #[test]
    fn adiabatic_tracks_do_not_cross() {
        let mut src = |t: f64| Ok(two_level(t, 0.1));
        let flow = build_adaptive_flow(&mut src, -2.0, 2.0, None, &AdaptiveSettings::for_span(4.0)).unwrap();
        for e in &flow.energies {
            assert!(e[0] < e[1]);
        }
        for o in &flow.overlaps {
            assert!(o[(0, 0)] > 0.97 && o[(1, 1)] > 0.97);
        }
    }

    #[test]
    fn degenerate_cluster_follows_references() {
        let refs = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        let s = 0.5f64.sqrt();
        let slice = SliceData {
            time: 0.0,
            energies: vec![1.0, 1.0, 2.0],
            vectors: vec![vec![s, 0.0, s], vec![s, 0.0, -s], vec![0.0, 1.0, 0.0]],
        };
        let b = FlowBuilder::new(slice, 1.0, Some(&refs), TrackerSettings::default()).unwrap();
        let v = b.current_vectors();
        assert!((v[0][0] - 1.0).abs() < 1e-12);
        assert!((v[1][2] - 1.0).abs() < 1e-12);
        assert!((v[2][1].abs() - 1.0).abs() < 1e-12);
    }
}
