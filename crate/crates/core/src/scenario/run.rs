//! Mode pipelines: each writes its CSV/JSON outputs and a manifest.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::busch::{pair_ground_state, InteractionPoint};
use crate::error::{Error, Result};
use crate::exact::eigen::EigenSettings;
use crate::exact::{
    exact_dark_flow, run_sap, CheckpointPolicy, DarkFlowSettings, ExactSpectrum, SapControls, SpectrumControls,
};
use crate::hubbard::{
    band_deviation, cotunneling_rate, dark_state_of, evolve_hubbard, single_particle_rate, HubbardFlags,
    HubbardSpectrum, HubbardSystem, ModelKind, RateTable, RateTableSpec,
};
use crate::spectral::{
    detect_crossings, refine_crossing, track_bands, FlowBuilder, TrackerSettings, transition_probability, CrossingEvent, DarkFlow, RefineSettings,
    RefinementLevel, SliceData, SliceSource, CrossingCriteria,
};
use crate::trap::TrajectoryParams;

use super::config::{Mode, Model, Scenario};

/// Record of one run, written next to its outputs as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario_hash: String,
    pub code_version: String,
    pub mode: Mode,
    pub name: Option<String>,
    /// The scenario after overrides.
    pub scenario: Scenario,
    /// Values derived from the scenario (grid spacing, step, points).
    pub resolved: serde_json::Value,
    /// Seed of the eigensolver's random fill vectors.
    pub eigensolver_seed: u64,
    /// Output files, relative to the output directory.
    pub outputs: Vec<String>,
    pub workers: usize,
    pub wall_seconds: f64,
    pub diagnostics: serde_json::Value,
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn csv(&mut self, name: &str, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        write_json(&path, value)
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialization(format!("{other:?}")),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Full-precision decimal that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn uniform_times(total: f64, slices: usize) -> Vec<f64> {
    (0..slices).map(|s| total * s as f64 / (slices - 1) as f64).collect()
}

fn rate_spec(s: &Scenario) -> RateTableSpec {
    RateTableSpec {
        d_min: s.trajectory.d_min,
        d_max: s.trajectory.d_max,
        step: s.numerics.rate_step,
        ..RateTableSpec::default()
    }
}

fn variant_suffix(flags: &HubbardFlags, several: bool) -> String {
    match (several, flags.cotunneling) {
        (false, _) => String::new(),
        (true, true) => "_cotunneling_on".into(),
        (true, false) => "_cotunneling_off".into(),
    }
}

fn hubbard_kind(s: &Scenario) -> Result<ModelKind> {
    s.flags
        .model
        .hubbard_kind()
        .ok_or_else(|| Error::Config("this mode needs flags.model = bose or fermi".into()))
}

/// Runs `mode` for a scenario, writing into `out_dir`.
pub fn run(scenario: &Scenario, mode: Mode, out_dir: &Path, workers: usize) -> Result<RunSummary> {
    let notes = scenario.validate(mode)?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let mut out = Outputs::new(out_dir)?;
    let hash = scenario.hash(mode);
    let diagnostics = pool.install(|| match mode {
        Mode::Trajectory => run_trajectory(scenario, &mut out),
        Mode::Rates => run_rates(scenario, &mut out),
        Mode::HubbardRun => run_hubbard(scenario, &mut out),
        Mode::Spectrum => run_spectrum(scenario, &mut out),
        Mode::SweepFidelity => run_sweep(scenario, &mut out, &hash),
        Mode::Transitions => run_transitions(scenario, &mut out),
    });
    // A failing pipeline still leaves a manifest describing what was written.
    let (diagnostics, failure) = match diagnostics {
        Ok(d) => (d, None),
        Err(e) => (json!({ "error": e.to_string() }), Some(e)),
    };
    let resolved = json!({
        "notes": notes,
        "grid_spacing": scenario.grid().map(|g| g.h()).ok(),
        "dt": scenario.dt(),
        "totals": scenario.totals(),
        "energies": scenario.interaction_points().ok().map(|p| p.iter().map(|x| x.energy).collect::<Vec<_>>()),
        "couplings": scenario.interaction_points().ok().map(|p| p.iter().map(|x| x.g).collect::<Vec<_>>()),
    });
    let manifest = RunManifest {
        scenario_hash: hash,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        mode,
        name: scenario.name.clone(),
        scenario: scenario.clone(),
        resolved,
        eigensolver_seed: EigenSettings::default().seed,
        outputs: out.files.clone(),
        workers: workers.max(1),
        wall_seconds: started.elapsed().as_secs_f64(),
        diagnostics,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(RunSummary {
            out_dir: out_dir.to_path_buf(),
            manifest,
        }),
    }
}

fn run_trajectory(s: &Scenario, out: &mut Outputs) -> Result<serde_json::Value> {
    let traj = s.trajectory_for(s.physics.total_time)?;
    let rows = traj.sample(s.numerics.samples)?;
    out.csv(
        "trajectory.csv",
        &header(&["t", "d_L", "d_M", "d_R", "sep_LM", "sep_MR"]),
        rows.iter().map(|(t, l)| {
            vec![num(*t), num(l.left), num(l.middle), num(l.right), num(l.sep_lm()), num(l.sep_mr())]
        }),
    )?;
    let min_lm = rows.iter().map(|(_, l)| l.sep_lm()).fold(f64::INFINITY, f64::min);
    let min_mr = rows.iter().map(|(_, l)| l.sep_mr()).fold(f64::INFINITY, f64::min);
    Ok(json!({ "rows": rows.len(), "min_sep_lm": min_lm, "min_sep_mr": min_mr }))
}

fn single_point(s: &Scenario) -> Result<InteractionPoint> {
    Ok(s.interaction_points()?[0])
}

fn run_rates(s: &Scenario, out: &mut Outputs) -> Result<serde_json::Value> {
    let point = single_point(s)?;
    let table = RateTable::build(point, &rate_spec(s))?;
    let path = out.path("rates.csv");
    table.write_csv(&path)?;
    let at = table.at(s.trajectory.d_min)?;
    Ok(json!({ "rows": table.rows.len(), "at_d_min": at }))
}

fn hubbard_systems(s: &Scenario) -> Result<Vec<HubbardSystem>> {
    let kind = hubbard_kind(s)?;
    let point = single_point(s)?;
    let table = Arc::new(RateTable::build(point, &rate_spec(s))?);
    let traj = s.trajectory_for(s.physics.total_time)?;
    s.flags
        .hubbard_variants()
        .into_iter()
        .map(|f| HubbardSystem::new(kind, traj, f, table.clone()))
        .collect()
}

#[derive(Serialize)]
struct DarkSummary<'a> {
    cotunneling: bool,
    track: usize,
    initial_weight: f64,
    target_weight: f64,
    reaches_target: bool,
    warnings: usize,
    labels: Vec<String>,
    initial_state: &'a [f64],
    final_state: &'a [f64],
}

fn run_hubbard(s: &Scenario, out: &mut Outputs) -> Result<serde_json::Value> {
    let systems = hubbard_systems(s)?;
    let several = systems.len() > 1;
    let mut diag = Vec::new();
    for sys in &systems {
        let suffix = variant_suffix(&sys.flags, several);
        let psi0 = sys.basis_vector(sys.pair_index(0));
        let series = evolve_hubbard(sys, &psi0, s.numerics.hubbard_dt, s.numerics.record_every)?;
        series.write_csv(&out.path(&format!("populations{suffix}.csv")))?;
        let dark = dark_state_of(sys)?;
        out.json(
            &format!("dark_state{suffix}.json"),
            &DarkSummary {
                cotunneling: sys.flags.cotunneling,
                track: dark.track,
                initial_weight: dark.initial_weight,
                target_weight: dark.target_weight,
                reaches_target: dark.reaches_target,
                warnings: dark.warnings.len(),
                labels: sys.labels(),
                initial_state: &dark.initial_state,
                final_state: &dark.final_state,
            },
        )?;
        diag.push(json!({
            "cotunneling": sys.flags.cotunneling,
            "final_target_population": series.final_populations()[sys.pair_index(2)],
            "norm_drift": series.norm_drift,
            "dark_track_reaches_target": dark.reaches_target,
        }));
    }
    Ok(json!({ "runs": diag }))
}

fn exact_slices(s: &Scenario, point: InteractionPoint, traj: TrajectoryParams, times: &[f64]) -> Result<Vec<SliceData>> {
    let grid = s.grid()?;
    let mut controls = SpectrumControls::new(grid, point.g, traj, s.numerics.eigen_count);
    controls.eigen.tolerance = s.numerics.eigen_tolerance;
    let mut spec = ExactSpectrum::new(controls);
    times.iter().map(|&t| SliceSource::slice(&mut spec, t)).collect()
}

fn run_spectrum(s: &Scenario, out: &mut Outputs) -> Result<serde_json::Value> {
    let point = single_point(s)?;
    let traj = s.trajectory_for(s.physics.total_time)?;
    let times = uniform_times(traj.total_time, s.numerics.slices);
    let sorted_rows = |slices: &[SliceData]| -> Vec<Vec<String>> {
        slices
            .iter()
            .map(|sl| std::iter::once(num(sl.time)).chain(sl.energies.iter().map(|&e| num(e))).collect())
            .collect()
    };
    let level_header = |k: usize| -> Vec<String> {
        std::iter::once("t".to_string()).chain((0..k).map(|i| format!("E{i}"))).collect()
    };

    let exact = if s.flags.model == Model::Exact || s.numerics.compare_exact {
        let slices = exact_slices(s, point, traj, &times)?;
        out.csv("exact_levels.csv", &level_header(s.numerics.eigen_count), sorted_rows(&slices))?;
        Some(slices)
    } else {
        None
    };

    match s.flags.model {
        Model::Exact => {
            let slices = exact.expect("exact slices computed");
            let grid = s.grid()?;
            let start = traj.positions_at(0.0)?;
            let refs: Vec<Vec<f64>> = start
                .centres()
                .iter()
                .map(|&c| pair_ground_state(point.g, c, &grid).map(|p| p.amplitudes))
                .collect::<Result<_>>()?;
            let mut flow = track_bands(slices, grid.dv(), Some(&refs))?;
            flow.label_bands(point.energy, 0.05);
            flow.write_csv(&out.path("spectrum.csv"))?;
            out.json("bands.json", &json!({ "labels": flow.labels, "dark_track": 0, "events": flow.events }))?;
            Ok(json!({ "slices": flow.len(), "continuation_events": flow.events.len(), "labels": flow.labels }))
        }
        Model::Bose | Model::Fermi => {
            let systems = hubbard_systems(s)?;
            let several = systems.len() > 1;
            let mut diag = Vec::new();
            for sys in &systems {
                let suffix = variant_suffix(&sys.flags, several);
                let mut src = HubbardSpectrum { system: sys };
                let slices: Vec<SliceData> = times.iter().map(|&t| src.slice(t)).collect::<Result<_>>()?;
                let refs: Vec<Vec<f64>> = (0..sys.dim()).map(|k| sys.basis_vector(k)).collect();
                out.csv(&format!("levels{suffix}.csv"), &level_header(sys.dim()), sorted_rows(&slices))?;
                let hub_levels: Vec<Vec<f64>> = slices.iter().map(|x| x.energies.clone()).collect();
                // Track with the builder directly to keep the aligned
                // eigenvectors (Fock coefficients) of every slice.
                let labels = sys.labels();
                let mut head = header(&["t", "track", "energy"]);
                head.extend(labels.iter().cloned());
                let mut rows = Vec::new();
                let mut push_rows = |b: &FlowBuilder| {
                    for (track, (e, v)) in b.current_energies().iter().zip(b.current_vectors()).enumerate() {
                        let mut r = vec![num(b.time()), track.to_string(), num(*e)];
                        r.extend(v.iter().map(|&c| num(c)));
                        rows.push(r);
                    }
                };
                let mut it = slices.into_iter();
                let mut builder = FlowBuilder::new(it.next().expect("two slices"), 1.0, Some(&refs), TrackerSettings::default())?;
                push_rows(&builder);
                for sl in it {
                    builder.push(sl)?;
                    push_rows(&builder);
                }
                let flow = builder.finish();
                flow.write_csv(&out.path(&format!("spectrum{suffix}.csv")))?;
                out.csv(&format!("eigenstates{suffix}.csv"), &head, rows)?;
                let dark = dark_state_of(sys)?;
                out.json(
                    &format!("dark_track{suffix}.json"),
                    &json!({
                        "track": dark.track,
                        "reaches_target": dark.reaches_target,
                        "target_weight": dark.target_weight,
                        "times": dark.flow.times,
                        "energy": dark.flow.track(dark.track),
                    }),
                )?;
                let mut d = json!({
                    "cotunneling": sys.flags.cotunneling,
                    "dark_track_reaches_target": dark.reaches_target,
                });
                if let Some(ex) = &exact {
                    let ex_levels: Vec<Vec<f64>> = ex.iter().map(|x| x.energies.clone()).collect();
                    let dev = band_deviation(sys.kind, &times, &hub_levels, &ex_levels)?;
                    d["max_deviation_from_exact"] = json!(dev);
                }
                diag.push(d);
            }
            Ok(json!({ "runs": diag }))
        }
    }
}

fn run_sweep(s: &Scenario, out: &mut Outputs, hash: &str) -> Result<serde_json::Value> {
    let points = s.interaction_points()?;
    let totals = s.totals();
    let grid = s.grid()?;
    let cells: Vec<(InteractionPoint, f64)> = points.iter().flat_map(|&p| totals.iter().map(move |&t| (p, t))).collect();
    let ckpt_dir = out.dir.join("checkpoints");
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(point, total)| {
            let checkpoint = s.numerics.checkpoint_interval.map(|interval| CheckpointPolicy {
                dir: ckpt_dir.clone(),
                interval,
                tag: format!("E{}_T{}", point.energy, total),
                scenario_hash: hash.to_string(),
            });
            if let Some(c) = &checkpoint {
                std::fs::create_dir_all(&c.dir).map_err(|e| Error::io(&c.dir, e))?;
            }
            let controls = SapControls {
                grid,
                dt: s.dt(),
                scheme: s.numerics.scheme,
                trajectory: s.trajectory_for(total)?,
                checkpoint,
            };
            run_sap(point, &controls)
        })
        .collect::<Result<_>>()?;
    out.csv(
        "fidelity.csv",
        &header(&["E_g", "g", "T", "F", "norm_drift", "runtime_seconds"]),
        results.iter().map(|r| {
            vec![
                num(r.energy),
                num(r.g),
                num(r.total_time),
                num(r.fidelity),
                num(r.report.norm_drift),
                num(r.runtime_seconds),
            ]
        }),
    )?;
    let worst_sym = results.iter().map(|r| r.report.symmetry_violation).fold(0.0, f64::max);
    let worst_norm = results.iter().map(|r| r.report.norm_drift).fold(0.0, f64::max);
    Ok(json!({
        "cells": results.len(),
        "max_norm_drift": worst_norm,
        "max_symmetry_violation": worst_sym,
        "runs": results.iter().map(|r| json!({
            "E_g": r.energy, "T": r.total_time, "F": r.fidelity, "steps": r.report.steps,
            "symmetry_violation": r.report.symmetry_violation, "resumed_from": r.resumed_from,
        })).collect::<Vec<_>>(),
    }))
}

/// Transition estimates for every crossing of one flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossingReport {
    pub energy: f64,
    /// Position in time order.
    pub crossing: usize,
    /// The crossing in the time units of the flow's protocol.
    pub event: CrossingEvent,
    pub flow_total_time: f64,
    pub levels: Vec<RefinementLevel>,
    pub converged: Option<bool>,
    pub cells: Vec<TransitionRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionRow {
    pub total_time: f64,
    pub p: Option<f64>,
    pub numerator: Option<f64>,
    pub denominator: Option<f64>,
    pub edge_ratio: Option<f64>,
    pub failure: Option<String>,
}

/// Evaluates each crossing of `dark` for every duration, re-slicing around
/// it through `source` when `refine` is given.
pub fn evaluate_crossings<S: SliceSource + ?Sized>(
    source: &mut S,
    energy: f64,
    dark: &DarkFlow,
    totals: &[f64],
    refine: Option<&RefineSettings>,
) -> Result<Vec<CrossingReport>> {
    let events = detect_crossings(&dark.flow, dark.track, dark.criteria)?;
    let mut reports = Vec::new();
    for (c, ev) in events.iter().enumerate() {
        let row_of = |total: f64, r: Result<crate::spectral::TransitionEstimate>| match r {
            Ok(e) => TransitionRow {
                total_time: total,
                p: Some(e.p),
                numerator: Some(e.numerator),
                denominator: Some(e.denominator),
                edge_ratio: Some(e.edge_ratio),
                failure: None,
            },
            Err(err) => TransitionRow {
                total_time: total,
                p: None,
                numerator: None,
                denominator: None,
                edge_ratio: None,
                failure: Some(err.to_string()),
            },
        };
        let report = match refine {
            Some(settings) => match refine_crossing(source, &dark.flow, ev, dark.total_time, totals, settings) {
                Ok(r) => CrossingReport {
                    energy,
                    crossing: c,
                    event: r.event.clone(),
                    flow_total_time: dark.total_time,
                    levels: r.levels,
                    converged: Some(r.converged),
                    cells: totals.iter().zip(r.estimates).map(|(&t, e)| row_of(t, Ok(e))).collect(),
                },
                Err(err) => CrossingReport {
                    energy,
                    crossing: c,
                    event: ev.clone(),
                    flow_total_time: dark.total_time,
                    levels: Vec::new(),
                    converged: None,
                    cells: totals.iter().map(|&t| row_of(t, Err(Error::Numerical(err.to_string())))).collect(),
                },
            },
            None => CrossingReport {
                energy,
                crossing: c,
                event: ev.clone(),
                flow_total_time: dark.total_time,
                levels: Vec::new(),
                converged: None,
                cells: totals
                    .iter()
                    .map(|&total| {
                        let f = total / dark.total_time;
                        let est = dark.flow.rescaled(dark.total_time, total).and_then(|flow| {
                            transition_probability(&flow, ev.track, ev.partner, (ev.window.0 * f, ev.window.1 * f), total)
                        });
                        row_of(total, est)
                    })
                    .collect(),
            },
        };
        reports.push(report);
    }
    Ok(reports)
}

fn run_transitions(s: &Scenario, out: &mut Outputs) -> Result<serde_json::Value> {
    let points = s.interaction_points()?;
    let totals = s.totals();
    let reference = s.trajectory_for(s.physics.total_time)?;
    let nu = s.numerics;
    let refine = nu.refine.then(|| RefineSettings {
        tolerance: nu.refine_tolerance,
        max_levels: nu.refine_levels,
        crossing_floor: nu.crossing_floor,
        criteria: CrossingCriteria::new(nu.gap_threshold),
        ..RefineSettings::default()
    });
    let per_point: Vec<(Vec<CrossingReport>, DarkFlow)> = points
        .par_iter()
        .map(|&point| match s.flags.model {
            Model::Exact => {
                let settings = DarkFlowSettings {
                    count: nu.eigen_count,
                    max_step_fraction: nu.flow_max_step_fraction,
                    epsilon: nu.flow_epsilon,
                    crossing_floor: nu.crossing_floor,
                    gap_threshold: nu.gap_threshold,
                };
                let (dark, mut spec) = exact_dark_flow(point, s.grid()?, reference, &settings)?;
                let reports = evaluate_crossings(&mut spec, point.energy, &dark, &totals, refine.as_ref())?;
                Ok((reports, dark))
            }
            Model::Bose | Model::Fermi => {
                let kind = hubbard_kind(s)?;
                let table = Arc::new(RateTable::build(point, &rate_spec(s))?);
                let flags = s.flags.hubbard_variants()[0];
                let sys = HubbardSystem::new(kind, reference, flags, table)?;
                let report = dark_state_of(&sys)?;
                let dark = DarkFlow {
                    flow: report.flow,
                    track: report.track,
                    total_time: reference.total_time,
                    criteria: CrossingCriteria::new(nu.gap_threshold),
                };
                let mut src = HubbardSpectrum { system: &sys };
                let reports = evaluate_crossings(&mut src, point.energy, &dark, &totals, refine.as_ref())?;
                Ok((reports, dark))
            }
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut failures = 0usize;
    let mut all = Vec::new();
    for (point, (reports, dark)) in points.iter().zip(&per_point) {
        dark.flow.write_csv(&out.path(&format!("flow_E{}.csv", point.energy)))?;
        for r in reports {
            for c in &r.cells {
                failures += usize::from(c.failure.is_some());
                let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
                rows.push(vec![
                    num(r.energy),
                    num(c.total_time),
                    opt(c.p),
                    opt(c.numerator),
                    opt(c.denominator),
                    r.crossing.to_string(),
                    r.event.partner.to_string(),
                    num(r.event.time / r.flow_total_time),
                    num(r.event.gap),
                    opt(c.edge_ratio),
                    c.failure.clone().unwrap_or_default(),
                ]);
            }
        }
        all.extend(reports.iter().cloned());
    }
    out.csv(
        "transitions.csv",
        &header(&[
            "E_g",
            "T",
            "p",
            "numerator",
            "denominator",
            "crossing",
            "partner",
            "t_c_fraction",
            "gap",
            "edge_ratio",
            "failure",
        ]),
        rows,
    )?;
    out.json("crossings.json", &all)?;
    if failures > 0 {
        return Err(Error::Numerical(format!("{failures} transition estimates failed; see transitions.csv")));
    }
    Ok(json!({ "crossings": all.len(), "cells": all.iter().map(|r| r.cells.len()).sum::<usize>() }))
}

/// Static validation plus optional cheap probes.
pub fn validate(scenario: &Scenario, mode: Mode, probes: bool) -> Result<serde_json::Value> {
    let notes = scenario.validate(mode)?;
    let mut report = json!({
        "mode": mode,
        "scenario_hash": scenario.hash(mode),
        "notes": notes,
        "scenario": scenario,
    });
    if probes && mode != Mode::Trajectory {
        let point = scenario.interaction_points()?[0];
        let d = scenario.trajectory.d_min;
        let mut p = json!({
            "single_particle_rate_at_d_min": single_particle_rate(d)?,
            "cotunneling_rate_at_d_min": cotunneling_rate(d, point.g, &Default::default())?.value,
        });
        let exact = matches!(mode, Mode::SweepFidelity | Mode::Transitions | Mode::Spectrum)
            && (scenario.flags.model == Model::Exact || scenario.numerics.compare_exact);
        if exact {
            let traj = scenario.trajectory_for(scenario.physics.total_time)?;
            let mut controls = SpectrumControls::new(scenario.grid()?, point.g, traj, scenario.numerics.eigen_count.min(4));
            controls.eigen.tolerance = scenario.numerics.eigen_tolerance;
            let slice = ExactSpectrum::new(controls).slice(0.0)?;
            p["eigenslice_t0"] = json!({ "energies": slice.energies, "residuals": slice.residuals });
        }
        report["probes"] = p;
    }
    Ok(report)
}
