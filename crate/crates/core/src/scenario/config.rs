//! Scenario files: a TOML tree with dotted-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::busch::{InteractionPoint, PAIR_STATE_MARGIN};
use crate::error::{Error, Result};
use crate::exact::Scheme;
use crate::grid::Grid2D;
use crate::hubbard::{HubbardFlags, ModelKind, RateSign};
use crate::trap::TrajectoryParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Trajectory,
    Rates,
    HubbardRun,
    Spectrum,
    SweepFidelity,
    Transitions,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Trajectory,
        Mode::Rates,
        Mode::HubbardRun,
        Mode::Spectrum,
        Mode::SweepFidelity,
        Mode::Transitions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Trajectory => "trajectory",
            Mode::Rates => "rates",
            Mode::HubbardRun => "hubbard-run",
            Mode::Spectrum => "spectrum",
            Mode::SweepFidelity => "sweep-fidelity",
            Mode::Transitions => "transitions",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        Mode::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    #[default]
    Exact,
    Bose,
    Fermi,
}

impl Model {
    pub fn hubbard_kind(self) -> Option<ModelKind> {
        match self {
            Model::Exact => None,
            Model::Bose => Some(ModelKind::Bose),
            Model::Fermi => Some(ModelKind::Fermi),
        }
    }
}

/// Evenly spaced interaction energies, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    /// Pair energy `E_g` of a single run.
    pub energy: Option<f64>,
    /// Coupling `g` of a single run (exclusive with `energy`).
    pub g: Option<f64>,
    /// Explicit energies for sweeps.
    pub energies: Option<Vec<f64>>,
    pub energy_grid: Option<EnergyGrid>,
    pub total_time: f64,
    /// Durations for sweeps; defaults to `[total_time]`.
    pub totals: Option<Vec<f64>>,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            energy: None,
            g: None,
            energies: None,
            energy_grid: None,
            total_time: 4000.0,
            totals: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub d_min: f64,
    pub d_max: f64,
    /// Delay between the two approaches as a fraction of `T`.
    pub delay_fraction: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig {
            d_min: 3.0,
            d_max: 9.0,
            delay_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub half_width: f64,
    pub n: usize,
    pub scheme: Scheme,
    /// Exact propagation step; the scheme default when absent.
    pub dt: Option<f64>,
    pub eigen_count: usize,
    pub eigen_tolerance: f64,
    /// Uniform slices for spectrum mode.
    pub slices: usize,
    /// Rows of the trajectory table.
    pub samples: usize,
    pub hubbard_dt: f64,
    /// Hubbard populations are stored every this many steps.
    pub record_every: usize,
    /// Separation spacing of rate tables.
    pub rate_step: f64,
    pub flow_epsilon: f64,
    pub flow_max_step_fraction: f64,
    pub crossing_floor: f64,
    pub gap_threshold: f64,
    /// Re-slice every crossing until `p` is converged.
    pub refine: bool,
    pub refine_tolerance: f64,
    pub refine_levels: usize,
    /// Checkpoint interval of exact runs; none when absent.
    pub checkpoint_interval: Option<f64>,
    /// Spectrum mode with a Hubbard model also diagonalises the exact
    /// Hamiltonian at the same slices.
    pub compare_exact: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            half_width: 15.0,
            n: 300,
            scheme: Scheme::ExponentialMidpoint,
            dt: None,
            eigen_count: 12,
            eigen_tolerance: 1e-8,
            slices: 41,
            samples: 801,
            hubbard_dt: 0.1,
            record_every: 10,
            rate_step: 0.05,
            flow_epsilon: 0.02,
            flow_max_step_fraction: 1.0 / 80.0,
            crossing_floor: 1e-5,
            gap_threshold: 0.05,
            refine: true,
            refine_tolerance: 1e-3,
            refine_levels: 4,
            checkpoint_interval: None,
            compare_exact: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Flags {
    pub model: Model,
    pub cotunneling: bool,
    /// Hubbard modes run both with and without co-tunneling.
    pub compare_cotunneling: bool,
    pub sign: RateSign,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            model: Model::Exact,
            cotunneling: true,
            compare_cotunneling: false,
            sign: RateSign::Magnitude,
        }
    }
}

impl Flags {
    /// Co-tunneling settings to run, in output order.
    pub fn hubbard_variants(&self) -> Vec<HubbardFlags> {
        let with = |c: bool| HubbardFlags {
            cotunneling: c,
            sign: self.sign,
        };
        if self.compare_cotunneling {
            vec![with(false), with(true)]
        } else {
            vec![with(self.cotunneling)]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub name: Option<String>,
    pub mode: Option<Mode>,
    pub physics: Physics,
    pub trajectory: TrajectoryConfig,
    pub numerics: Numerics,
    pub flags: Flags,
    pub output: OutputConfig,
}

/// Coarsest grid spacing accepted for exact modes.
pub const MAX_GRID_SPACING: f64 = 0.25;
/// Largest step for the exponential-midpoint scheme.
pub const MAX_MIDPOINT_DT: f64 = 1.0;
/// Largest step for the split-step scheme.
pub const MAX_SPLIT_DT: f64 = 0.02;

fn parse_value(raw: &str) -> toml::Value {
    // Bare words that are not valid TOML values are taken as strings.
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Applies `key.path=value` to a TOML tree.
pub fn apply_override(tree: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key '{key}'")));
    }
    let mut table = tree;
    for p in &parts[..parts.len() - 1] {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key '{key}': '{p}' is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl Scenario {
    /// Parses TOML text and applies overrides in order.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Scenario> {
        let mut tree: toml::Table = toml::from_str(text).map_err(|e| Error::Config(format!("scenario parse error: {e}")))?;
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        toml::Value::Table(tree)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("scenario error: {e}")))
    }

    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, overrides)
    }

    /// Mode of the run: `requested` when given, else the file's own. A file
    /// declaring a different mode is rejected.
    pub fn resolve_mode(&self, requested: Option<Mode>) -> Result<Mode> {
        match (requested, self.mode) {
            (Some(r), Some(m)) if r != m => Err(Error::Config(format!(
                "scenario declares mode '{}' but '{}' was requested",
                m.name(),
                r.name()
            ))),
            (Some(r), _) => Ok(r),
            (None, Some(m)) => Ok(m),
            (None, None) => Err(Error::Config("scenario declares no mode".into())),
        }
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::symmetric(self.numerics.half_width, self.numerics.n)
    }

    pub fn dt(&self) -> f64 {
        self.numerics.dt.unwrap_or_else(|| self.numerics.scheme.default_dt())
    }

    /// Trajectory for a protocol of duration `total`.
    pub fn trajectory_for(&self, total: f64) -> Result<TrajectoryParams> {
        let mut p = TrajectoryParams::new(total)?.with_separations(self.trajectory.d_min, self.trajectory.d_max)?;
        p.delay = self.trajectory.delay_fraction * total;
        p.validate()?;
        Ok(p)
    }

    pub fn totals(&self) -> Vec<f64> {
        self.physics.totals.clone().unwrap_or_else(|| vec![self.physics.total_time])
    }

    /// All interaction points named by the physics section.
    pub fn interaction_points(&self) -> Result<Vec<InteractionPoint>> {
        let ph = &self.physics;
        let given = [ph.energy.is_some(), ph.g.is_some(), ph.energies.is_some(), ph.energy_grid.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given != 1 {
            return Err(Error::Config(
                "give exactly one of physics.energy, physics.g, physics.energies, physics.energy_grid".into(),
            ));
        }
        if let Some(e) = ph.energy {
            return Ok(vec![InteractionPoint::from_energy(e)?]);
        }
        if let Some(g) = ph.g {
            return Ok(vec![InteractionPoint::from_g(g)?]);
        }
        let energies = match (&ph.energies, ph.energy_grid) {
            (Some(list), _) => list.clone(),
            (None, Some(grid)) => {
                if grid.count < 1 || !(grid.stop >= grid.start) {
                    return Err(Error::Config("energy_grid needs count >= 1 and stop >= start".into()));
                }
                if grid.count == 1 {
                    vec![grid.start]
                } else {
                    (0..grid.count)
                        .map(|k| grid.start + (grid.stop - grid.start) * k as f64 / (grid.count - 1) as f64)
                        // Grid values are meant as decimals; drop rounding noise.
                        .map(|e| (e * 1e12).round() / 1e12)
                        .collect()
                }
            }
            _ => unreachable!(),
        };
        if energies.is_empty() {
            return Err(Error::Config("empty energy list".into()));
        }
        energies.into_iter().map(InteractionPoint::from_energy).collect()
    }

    /// Static checks for `mode`; returns notes on resolved defaults.
    pub fn validate(&self, mode: Mode) -> Result<Vec<String>> {
        let mut notes = Vec::new();
        let nu = &self.numerics;
        for &total in &self.totals() {
            self.trajectory_for(total)?;
        }
        if !(self.physics.total_time > 0.0) {
            return Err(Error::Config("physics.total_time must be positive".into()));
        }
        if mode != Mode::Trajectory {
            let points = self.interaction_points()?;
            if mode != Mode::SweepFidelity && mode != Mode::Transitions && points.len() != 1 {
                return Err(Error::Config(format!("mode '{}' takes a single interaction point", mode.name())));
            }
            notes.push(format!(
                "interaction points: {}",
                points
                    .iter()
                    .map(|p| format!("E_g={} (g={:.6})", p.energy, p.g))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        } else if nu.samples < 2 {
            return Err(Error::Config("numerics.samples must be at least 2".into()));
        }
        let uses_grid = match mode {
            Mode::SweepFidelity | Mode::Transitions => self.flags.model == Model::Exact,
            Mode::Spectrum => self.flags.model == Model::Exact || nu.compare_exact,
            _ => false,
        };
        if mode == Mode::SweepFidelity && self.flags.model != Model::Exact {
            return Err(Error::Config("sweep-fidelity runs the exact model only".into()));
        }
        if mode == Mode::HubbardRun && self.flags.model == Model::Exact {
            return Err(Error::Config("hubbard-run needs flags.model = bose or fermi".into()));
        }
        if uses_grid {
            let grid = self.grid()?;
            if grid.h() > MAX_GRID_SPACING {
                return Err(Error::Config(format!(
                    "grid spacing {:.4} exceeds the floor {MAX_GRID_SPACING}",
                    grid.h()
                )));
            }
            let reach = self.trajectory.d_max + PAIR_STATE_MARGIN;
            if nu.half_width < reach {
                return Err(Error::Config(format!(
                    "numerics.half_width = {} must be at least d_max + {PAIR_STATE_MARGIN} = {reach}",
                    nu.half_width
                )));
            }
            notes.push(format!("grid n = {}, h = {:.5}", grid.n(), grid.h()));
        }
        if mode == Mode::SweepFidelity {
            let dt = self.dt();
            let max = match nu.scheme {
                Scheme::ExponentialMidpoint => MAX_MIDPOINT_DT,
                Scheme::SplitStep => MAX_SPLIT_DT,
            };
            if !(dt > 0.0 && dt <= max) {
                return Err(Error::Config(format!("dt = {dt} outside (0, {max}] for {}", nu.scheme.name())));
            }
            if let Some(iv) = nu.checkpoint_interval {
                if !(iv > 0.0) {
                    return Err(Error::Config("numerics.checkpoint_interval must be positive".into()));
                }
            }
            notes.push(format!("scheme {} with dt = {dt}", nu.scheme.name()));
        }
        if matches!(mode, Mode::Spectrum | Mode::Transitions) {
            if !(1..=64).contains(&nu.eigen_count) {
                return Err(Error::Config("numerics.eigen_count must lie in 1..=64".into()));
            }
            if nu.slices < 2 {
                return Err(Error::Config("numerics.slices must be at least 2".into()));
            }
            if !(nu.eigen_tolerance > 0.0) {
                return Err(Error::Config("numerics.eigen_tolerance must be positive".into()));
            }
        }
        if self.flags.model == Model::Fermi && nu.compare_exact && nu.eigen_count < 12 {
            return Err(Error::Config("comparing the Fermi model needs eigen_count >= 12".into()));
        }
        if self.flags.model == Model::Bose && nu.compare_exact && nu.eigen_count < 6 {
            return Err(Error::Config("comparing the Bose model needs eigen_count >= 6".into()));
        }
        if mode == Mode::Transitions {
            if !(nu.flow_epsilon > 0.0 && nu.flow_epsilon < 1.0) {
                return Err(Error::Config("numerics.flow_epsilon must lie in (0, 1)".into()));
            }
            if !(nu.flow_max_step_fraction > 0.0 && nu.flow_max_step_fraction <= 0.5) {
                return Err(Error::Config("numerics.flow_max_step_fraction must lie in (0, 0.5]".into()));
            }
            if self.flags.model == Model::Exact && nu.eigen_count < 3 {
                return Err(Error::Config("transitions need eigen_count >= 3".into()));
            }
        }
        if matches!(mode, Mode::HubbardRun) && !(nu.hubbard_dt > 0.0 && nu.record_every >= 1) {
            return Err(Error::Config("numerics.hubbard_dt must be positive and record_every >= 1".into()));
        }
        if matches!(mode, Mode::Rates | Mode::HubbardRun | Mode::Spectrum | Mode::Transitions)
            && !(nu.rate_step > 0.0 && nu.rate_step <= 0.5)
        {
            return Err(Error::Config("numerics.rate_step must lie in (0, 0.5]".into()));
        }
        Ok(notes)
    }

    /// Hex SHA-256 of the scenario with the output section cleared, so that
    /// the hash names the computation, not where it was written.
    pub fn hash(&self, mode: Mode) -> String {
        let mut s = self.clone();
        s.output = OutputConfig::default();
        s.mode = Some(mode);
        let canonical = serde_json::to_string(&s).expect("scenario serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_create_nested_keys() {
        let s = Scenario::from_toml(
            "mode = 'rates'\n[physics]\nenergy = 1.25\n",
            &["numerics.n=128".into(), "flags.model=bose".into(), "physics.energy=1.3".into()],
        )
        .unwrap();
        assert_eq!(s.numerics.n, 128);
        assert_eq!(s.flags.model, Model::Bose);
        assert_eq!(s.physics.energy, Some(1.3));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(Scenario::from_toml("[physics]\nenergyy = 1.2\n", &[]), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut a = Scenario::from_toml("[physics]\nenergy = 1.25\n", &[]).unwrap();
        let h = a.hash(Mode::Rates);
        a.output.dir = Some("elsewhere".into());
        assert_eq!(h, a.hash(Mode::Rates));
        a.numerics.n = 256;
        assert_ne!(h, a.hash(Mode::Rates));
    }
}
