use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sap_sim::busch::{pair_ground_state, InteractionPoint};
use sap_sim::exact::{
    run_sap, static_trap_check, CheckpointPolicy, PotentialSchedule, Propagator, SapControls, Scheme, SpectrumControls,
    TwoBodyHamiltonian, WaveFunction2,
};
use sap_sim::grid::Grid2D;
use sap_sim::trap::TrajectoryParams;

// h = 30/128 = 0.234: coarse but inside the resolution floor.
fn grid() -> Grid2D {
    Grid2D::symmetric(15.0, 128).unwrap()
}

fn controls(total: f64) -> SapControls {
    SapControls {
        grid: grid(),
        dt: 0.25,
        scheme: Scheme::ExponentialMidpoint,
        trajectory: TrajectoryParams::new(total).unwrap(),
        checkpoint: None,
    }
}

#[test]
fn hamiltonian_is_symmetric_under_the_grid_inner_product() {
    let g = grid();
    let layout = TrajectoryParams::new(4000.0).unwrap().positions_at(1300.0).unwrap();
    let ham = TwoBodyHamiltonian::for_layout(g, &layout, 0.77).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (mut ha, mut hb) = (vec![0.0; g.len()], vec![0.0; g.len()]);
    ham.apply_into(&a, &mut ha);
    ham.apply_into(&b, &mut hb);
    let (x, y) = (g.inner(&a, &hb), g.inner(&ha, &b));
    assert!((x - y).abs() < 1e-10 * x.abs().max(1.0), "{x} vs {y}");
}

#[test]
fn separated_wells_at_zero_interaction_form_a_degenerate_band() {
    let c = SpectrumControls::new(grid(), 0.0, TrajectoryParams::new(4000.0).unwrap(), 3);
    let s = sap_sim::exact::lowest_eigenpairs(0.0, 3, &c).unwrap();
    assert!(s.energies.windows(2).all(|w| w[0] <= w[1]));
    for (e, r) in s.energies.iter().zip(&s.residuals) {
        assert!((e - 1.0).abs() < 0.01, "energy {e}");
        assert!(*r < 1e-6, "residual {r}");
    }
}

#[test]
fn lowest_eigenvalue_bounds_the_pair_state_energy() {
    let g = grid();
    let ip = InteractionPoint::from_energy(1.25).unwrap();
    let traj = TrajectoryParams::new(4000.0).unwrap();
    let layout = traj.positions_at(0.0).unwrap();
    let ham = TwoBodyHamiltonian::for_layout(g, &layout, ip.g).unwrap();
    let pair = pair_ground_state(ip.g, layout.left, &g).unwrap();
    let trial = ham.expectation(&pair.amplitudes);
    let c = SpectrumControls::new(g, ip.g, traj, 1);
    let lowest = sap_sim::exact::lowest_eigenpairs(0.0, 1, &c).unwrap().energies[0];
    assert!(lowest <= trial + 1e-9, "{lowest} > {trial}");
}

#[test]
fn stationary_state_only_gains_a_phase() {
    let g = grid();
    let traj = TrajectoryParams::new(4000.0).unwrap();
    let layout = traj.positions_at(0.0).unwrap();
    let c = SpectrumControls::new(g, 0.5, traj, 1);
    let s = sap_sim::exact::lowest_eigenpairs(0.0, 1, &c).unwrap();
    let v = &s.states.as_ref().unwrap()[0];
    let mut psi = WaveFunction2::from_real(g, 0.0, v).unwrap();
    let mut prop = Propagator::new(g, 0.5, PotentialSchedule::Static(layout), Scheme::ExponentialMidpoint, 0.25).unwrap();
    prop.propagate(&mut psi, 50.0).unwrap();
    let ov: Complex64 = psi.overlap_real(v);
    assert!((ov.norm() - 1.0).abs() < 1e-6, "|<psi0|psi1>| = {}", ov.norm());
    let expected = Complex64::from_polar(1.0, -s.energies[0] * 50.0);
    assert!((ov - expected).norm() < 1e-5, "phase {ov} vs {expected}");
}

#[test]
fn frozen_traps_conserve_energy() {
    let ip = InteractionPoint::from_energy(1.6).unwrap();
    let check = static_trap_check(ip, &controls(4000.0), 100.0).unwrap();
    assert!(check.energy_drift < 1e-6, "drift {}", check.energy_drift);
    assert!(check.report.norm_drift < 1e-8);
    assert!(check.report.symmetry_violation < 1e-10);
}

#[test]
fn split_step_agrees_with_the_midpoint_scheme() {
    let ip = InteractionPoint::from_energy(1.0).unwrap();
    let mid = run_sap(ip, &controls(100.0)).unwrap();
    let split = run_sap(
        ip,
        &SapControls {
            dt: 0.005,
            scheme: Scheme::SplitStep,
            ..controls(100.0)
        },
    )
    .unwrap();
    assert!((mid.fidelity - split.fidelity).abs() < 1e-3, "{} vs {}", mid.fidelity, split.fidelity);
    assert!(split.report.norm_drift < 1e-8);
}

#[test]
fn checkpointed_run_resumes_to_the_same_result() {
    let dir = tempfile::tempdir().unwrap();
    let ip = InteractionPoint::from_energy(1.25).unwrap();
    let policy = CheckpointPolicy {
        dir: dir.path().to_path_buf(),
        interval: 20.0,
        tag: "run".into(),
        scenario_hash: "test".into(),
    };
    let with = SapControls {
        checkpoint: Some(policy.clone()),
        ..controls(60.0)
    };
    let first = run_sap(ip, &with).unwrap();
    assert!(policy.data_path().exists());
    let plain = run_sap(ip, &controls(60.0)).unwrap();
    assert!((first.fidelity - plain.fidelity).abs() < 1e-12);
    let again = run_sap(ip, &with).unwrap();
    assert!(again.resumed_from.is_some());
    assert!((again.fidelity - plain.fidelity).abs() < 1e-12);

    // A checkpoint from another scenario is ignored.
    let other = SapControls {
        checkpoint: Some(CheckpointPolicy {
            scenario_hash: "other".into(),
            ..policy
        }),
        ..controls(60.0)
    };
    assert!(run_sap(ip, &other).unwrap().resumed_from.is_none());
}
