use std::sync::{Arc, OnceLock};

use sap_sim::busch::InteractionPoint;
use sap_sim::hubbard::{
    bose_hamiltonian, evolve_hubbard, fermi_hamiltonian, HubbardFlags, HubbardSystem, ModelKind, RateSet, RateTable,
    RateTableSpec,
};
use sap_sim::linalg::sorted_eigh;
use sap_sim::trap::TrajectoryParams;

fn table() -> Arc<RateTable> {
    static TABLE: OnceLock<Arc<RateTable>> = OnceLock::new();
    TABLE
        .get_or_init(|| Arc::new(RateTable::build(InteractionPoint::from_energy(1.25).unwrap(), &RateTableSpec::default()).unwrap()))
        .clone()
}

#[test]
fn decoupled_models_have_fock_eigenvectors() {
    for (kind, m) in [
        (ModelKind::Bose, bose_hamiltonian(&RateSet::decoupled(ModelKind::Bose, 1.3))),
        (ModelKind::Fermi, fermi_hamiltonian(&RateSet::decoupled(ModelKind::Fermi, 1.7))),
    ] {
        let (_, vectors) = sorted_eigh(&m).unwrap();
        for c in 0..vectors.ncols() {
            let col = vectors.column(c);
            let big = col.iter().filter(|x| x.abs() > 1e-14).count();
            assert_eq!(big, 1, "{kind:?} eigenvector {c} is not a Fock state");
        }
    }
}

#[test]
fn pair_states_sit_at_the_interaction_energy() {
    // Large separation: pair states cost E_g, separated atoms 1.
    let (levels, _) = sorted_eigh(&bose_hamiltonian(&RateSet::decoupled(ModelKind::Bose, 1.25))).unwrap();
    for (e, want) in levels.iter().zip([1.0, 1.0, 1.0, 1.25, 1.25, 1.25]) {
        assert!((e - want).abs() < 1e-12);
    }
}

#[test]
fn rate_table_roundtrips_through_csv() {
    let t = table();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rates.csv");
    t.write_csv(&path).unwrap();
    let back = RateTable::read_csv(t.interaction, &path).unwrap();
    for d in [3.0, 4.37, 6.0, 8.99] {
        let (a, b) = (t.at(d).unwrap(), back.at(d).unwrap());
        assert!((a.omega0 - b.omega0).abs() <= 1e-14 * a.omega0.abs());
        assert!((a.omega_co - b.omega_co).abs() <= 1e-14 * a.omega_co.abs().max(1e-300));
    }
}

#[test]
fn rates_decay_with_separation() {
    let t = table();
    let mut prev = f64::INFINITY;
    for k in 0..=12 {
        let r = t.at(3.0 + 0.5 * k as f64).unwrap();
        assert!(r.omega0.abs() < prev);
        prev = r.omega0.abs();
        assert!(r.omega_co.abs() < r.omega0.abs());
    }
}

#[test]
fn spectrum_is_invariant_under_protocol_reversal() {
    let traj = TrajectoryParams::new(4000.0).unwrap();
    for kind in [ModelKind::Bose, ModelKind::Fermi] {
        let sys = HubbardSystem::new(kind, traj, HubbardFlags::default(), table()).unwrap();
        for t in [0.0, 700.0, 1300.0, 1900.0] {
            let (a, _) = sorted_eigh(&sys.hamiltonian_at(t).unwrap()).unwrap();
            let (b, _) = sorted_eigh(&sys.hamiltonian_at(4000.0 - t).unwrap()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9, "{kind:?} t = {t}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn evolution_conserves_norm() {
    let traj = TrajectoryParams::new(1000.0).unwrap();
    for kind in [ModelKind::Bose, ModelKind::Fermi] {
        let sys = HubbardSystem::new(kind, traj, HubbardFlags::default(), table()).unwrap();
        let psi0 = sys.basis_vector(sys.pair_index(0));
        let series = evolve_hubbard(&sys, &psi0, 0.1, 100).unwrap();
        assert!(series.norm_drift < 1e-8);
        let total: f64 = series.final_populations().iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
        assert_eq!(series.times.len(), series.populations.len());
    }
}
