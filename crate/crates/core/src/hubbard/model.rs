//! Finite-size Bose- and Fermi-Hubbard Hamiltonians on three sites.
//!
//! Bose model, basis [`BOSE_BASIS`]:
//!
//! `H_B = sum_j (eps0 n_j + U/2 n_j (n_j - 1))
//!      + sum_<jj'> [ Omega_jj' (b+_j b_j' + h.c.)
//!                  + Omega^co_jj' / 2 (b+_j^2 b_j'^2 + h.c.) ]`
//!
//! with `eps0 = 1/2` and `U = E_g - 1`. The co-tunneling coefficient is
//! normalised so that `<2_j|H_B|2_j'> = Omega^co_jj'`, i.e. the rate is the
//! matrix element between the two localised pair states it was computed
//! from.
//!
//! Fermi model (fermionised pair, one particle per band), modes ordered
//! `L0, M0, R0, L1, M1, R1`:
//!
//! `H_F = sum_ji eps_i n_ji + U sum_j n_j0 n_j1
//!      + sum_<jj'> [ sum_i Omega^(i)_jj' (a+_ji a_j'i + h.c.)
//!                  + Omega^co_jj' (P+_j P_j' + h.c.) ]`
//!
//! with `P_j = a_j1 a_j0`, `eps0 = 1/2`, `eps1 = 3/2` and `U = E_g - 2`.
//!
//! Sign handling: with [`RateSign::Magnitude`] every hopping and pair term
//! enters with the magnitude of its rate, so all off-diagonal elements
//! between canonical basis states are non-negative. With [`RateSign::Raw`]
//! the signed Gram-Schmidt values are used as they are. The spectrum is
//! insensitive to the overall sign of the single-particle rates (it can be
//! gauged away on this open chain), but not to the sign of the pair term
//! relative to them.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::busch::InteractionPoint;
use crate::error::{Error, Result};
use crate::trap::TrajectoryParams;

use super::fock::{
    apply_bose, apply_fermi, bose_index, fermi_basis, fermi_index, fermi_labels, fermi_mode, Op,
    BOSE_BASIS, BOSE_LABELS,
};
use super::rates::{RateRow, RateTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Bose,
    Fermi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RateSign {
    #[default]
    Magnitude,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HubbardFlags {
    pub cotunneling: bool,
    #[serde(default)]
    pub sign: RateSign,
}

impl Default for HubbardFlags {
    fn default() -> Self {
        HubbardFlags {
            cotunneling: true,
            sign: RateSign::Magnitude,
        }
    }
}

/// Every parameter of the Hubbard Hamiltonian at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub omega_lm: f64,
    pub omega_mr: f64,
    pub omega1_lm: f64,
    pub omega1_mr: f64,
    pub co_lm: f64,
    pub co_mr: f64,
    pub u: f64,
    pub eps0: f64,
    pub eps1: f64,
}

impl RateSet {
    /// Rates for the two bonds of a layout, with signs and flags applied.
    pub fn from_rows(kind: ModelKind, energy: f64, lm: &RateRow, mr: &RateRow, flags: HubbardFlags) -> Self {
        let f = |v: f64| match flags.sign {
            RateSign::Magnitude => v.abs(),
            RateSign::Raw => v,
        };
        let co = |v: f64| if flags.cotunneling { f(v) } else { 0.0 };
        RateSet {
            omega_lm: f(lm.omega0),
            omega_mr: f(mr.omega0),
            omega1_lm: f(lm.omega1),
            omega1_mr: f(mr.omega1),
            co_lm: co(lm.omega_co),
            co_mr: co(mr.omega_co),
            u: match kind {
                ModelKind::Bose => energy - 1.0,
                ModelKind::Fermi => energy - 2.0,
            },
            eps0: 0.5,
            eps1: 1.5,
        }
    }

    /// All tunneling switched off.
    pub fn decoupled(kind: ModelKind, energy: f64) -> Self {
        let zero = RateRow {
            separation: f64::INFINITY,
            omega0: 0.0,
            omega1: 0.0,
            omega_co: 0.0,
        };
        Self::from_rows(kind, energy, &zero, &zero, HubbardFlags::default())
    }
}

/// Assembles a matrix from diagonal entries and operator-string terms.
fn assemble<S: Copy>(
    basis: &[S],
    diag: impl Fn(&S) -> f64,
    terms: &[(f64, Vec<Op>)],
    apply: impl Fn(&[Op], &S) -> Option<(S, f64)>,
    index: impl Fn(&S) -> Option<usize>,
) -> DMatrix<f64> {
    let n = basis.len();
    let mut m = DMatrix::zeros(n, n);
    for (c, s) in basis.iter().enumerate() {
        m[(c, c)] += diag(s);
        for (w, ops) in terms {
            if *w == 0.0 {
                continue;
            }
            if let Some((t, amp)) = apply(ops, s) {
                if let Some(r) = index(&t) {
                    m[(r, c)] += w * amp;
                }
            }
        }
    }
    m
}

fn bond_pairs(r: &RateSet) -> [(usize, usize, f64, f64, f64); 2] {
    [
        (0, 1, r.omega_lm, r.omega1_lm, r.co_lm),
        (1, 2, r.omega_mr, r.omega1_mr, r.co_mr),
    ]
}

/// Six-state Bose-Hubbard matrix.
pub fn bose_hamiltonian(r: &RateSet) -> DMatrix<f64> {
    let mut terms = Vec::new();
    for (a, b, om, _, co) in bond_pairs(r) {
        terms.push((om, vec![Op::Create(a), Op::Annihilate(b)]));
        terms.push((om, vec![Op::Create(b), Op::Annihilate(a)]));
        let half = 0.5 * co;
        terms.push((half, vec![Op::Create(a), Op::Create(a), Op::Annihilate(b), Op::Annihilate(b)]));
        terms.push((half, vec![Op::Create(b), Op::Create(b), Op::Annihilate(a), Op::Annihilate(a)]));
    }
    assemble(
        &BOSE_BASIS,
        |s| {
            s.iter()
                .map(|&n| {
                    let n = n as f64;
                    r.eps0 * n + 0.5 * r.u * n * (n - 1.0)
                })
                .sum()
        },
        &terms,
        |ops, s| apply_bose(ops, s),
        bose_index,
    )
}

/// Nine-state two-band Fermi-Hubbard matrix.
pub fn fermi_hamiltonian(r: &RateSet) -> DMatrix<f64> {
    let mut terms = Vec::new();
    for (a, b, om0, om1, co) in bond_pairs(r) {
        for (band, om) in [(0, om0), (1, om1)] {
            let (ma, mb) = (fermi_mode(a, band), fermi_mode(b, band));
            terms.push((om, vec![Op::Create(ma), Op::Annihilate(mb)]));
            terms.push((om, vec![Op::Create(mb), Op::Annihilate(ma)]));
        }
        // P+_a P_b = a+_a0 a+_a1 a_b1 a_b0.
        let pair = |x: usize, y: usize| {
            vec![
                Op::Create(fermi_mode(x, 0)),
                Op::Create(fermi_mode(x, 1)),
                Op::Annihilate(fermi_mode(y, 1)),
                Op::Annihilate(fermi_mode(y, 0)),
            ]
        };
        terms.push((co, pair(a, b)));
        terms.push((co, pair(b, a)));
    }
    let basis = fermi_basis();
    assemble(
        &basis,
        |&s| {
            let occ = |m: usize| ((s >> m) & 1) as f64;
            (0..3)
                .map(|j| {
                    r.eps0 * occ(fermi_mode(j, 0))
                        + r.eps1 * occ(fermi_mode(j, 1))
                        + r.u * occ(fermi_mode(j, 0)) * occ(fermi_mode(j, 1))
                })
                .sum()
        },
        &terms,
        |ops, &s| apply_fermi(ops, s),
        |&s| fermi_index(s),
    )
}

/// A Hubbard model driven along a trap trajectory.
#[derive(Debug, Clone)]
pub struct HubbardSystem {
    pub kind: ModelKind,
    pub trajectory: TrajectoryParams,
    pub flags: HubbardFlags,
    pub table: Arc<RateTable>,
}

impl HubbardSystem {
    pub fn new(kind: ModelKind, trajectory: TrajectoryParams, flags: HubbardFlags, table: Arc<RateTable>) -> Result<Self> {
        trajectory.validate()?;
        let (lo, hi) = table.domain();
        if trajectory.d_min < lo - 1e-9 || trajectory.d_max > hi + 1e-9 {
            return Err(Error::Config(format!(
                "rate table covers [{lo}, {hi}] but the trajectory spans [{}, {}]",
                trajectory.d_min, trajectory.d_max
            )));
        }
        Ok(HubbardSystem {
            kind,
            trajectory,
            flags,
            table,
        })
    }

    pub fn interaction(&self) -> InteractionPoint {
        self.table.interaction
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Bose => 6,
            ModelKind::Fermi => 9,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self.kind {
            ModelKind::Bose => BOSE_LABELS.iter().map(|s| s.to_string()).collect(),
            ModelKind::Fermi => fermi_labels().to_vec(),
        }
    }

    /// Basis index of the pair localised in `site` (0 = L, 2 = R).
    pub fn pair_index(&self, site: usize) -> usize {
        match self.kind {
            ModelKind::Bose => site,
            ModelKind::Fermi => 4 * site,
        }
    }

    pub fn rates_at(&self, t: f64) -> Result<RateSet> {
        let (lm, mr) = self.trajectory.separations_at(t)?;
        let energy = self.table.interaction.energy;
        Ok(RateSet::from_rows(
            self.kind,
            energy,
            &self.table.at(lm)?,
            &self.table.at(mr)?,
            self.flags,
        ))
    }

    pub fn matrix_for(&self, r: &RateSet) -> DMatrix<f64> {
        match self.kind {
            ModelKind::Bose => bose_hamiltonian(r),
            ModelKind::Fermi => fermi_hamiltonian(r),
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<DMatrix<f64>> {
        Ok(self.matrix_for(&self.rates_at(t)?))
    }

    /// Unit vector on a basis state.
    pub fn basis_vector(&self, index: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[index] = 1.0;
        v
    }
}

/// `H_B` at time `t` of the protocol (free-function form).
pub fn build_bose_matrix(t: f64, system: &HubbardSystem) -> Result<DMatrix<f64>> {
    if system.kind != ModelKind::Bose {
        return Err(Error::Contract("system is not a Bose model".into()));
    }
    system.hamiltonian_at(t)
}

/// `H_F` at time `t` of the protocol (free-function form).
pub fn build_fermi_matrix(t: f64, system: &HubbardSystem) -> Result<DMatrix<f64>> {
    if system.kind != ModelKind::Fermi {
        return Err(Error::Contract("system is not a Fermi model".into()));
    }
    system.hamiltonian_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_bose_is_diagonal() {
        let m = bose_hamiltonian(&RateSet::decoupled(ModelKind::Bose, 1.25));
        let d: Vec<f64> = (0..6).map(|i| m[(i, i)]).collect();
        assert_eq!(d, vec![1.25, 1.25, 1.25, 1.0, 1.0, 1.0]);
        assert_eq!(m.iter().filter(|v| **v != 0.0).count(), 6);
    }

    #[test]
    fn decoupled_fermi_is_diagonal() {
        let m = fermi_hamiltonian(&RateSet::decoupled(ModelKind::Fermi, 1.6));
        for i in 0..9 {
            let expected = if i % 4 == 0 { 1.6 } else { 2.0 };
            assert!((m[(i, i)] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn bosonic_enhancement() {
        let mut r = RateSet::decoupled(ModelKind::Bose, 1.25);
        r.omega_lm = 0.1;
        r.co_lm = 0.03;
        let m = bose_hamiltonian(&r);
        // <2_L|H|1_L 1_M> = sqrt(2) Omega, <2_L|H|2_M> = Omega_co.
        assert!((m[(0, 3)] - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        assert!((m[(0, 1)] - 0.03).abs() < 1e-15);
    }

    #[test]
    fn fermi_pair_term_sign() {
        let mut r = RateSet::decoupled(ModelKind::Fermi, 1.6);
        r.co_mr = 0.02;
        let m = fermi_hamiltonian(&r);
        assert!((m[(4, 8)] - 0.02).abs() < 1e-15);
        assert!((&m - m.transpose()).norm() < 1e-15);
    }
}
