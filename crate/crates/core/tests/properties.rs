use proptest::prelude::*;

use sap_sim::busch::{energy_from_g, g_from_energy, gamma};
use sap_sim::hubbard::{bose_hamiltonian, fermi_hamiltonian, RateSet};
use sap_sim::linalg::sorted_eigh;
use sap_sim::spectral::{nonadiabatic_coupling, track_bands, transition_probability, LandauZener, SliceData};
use sap_sim::trap::TrajectoryParams;

/// Stirling series for ln Gamma after shifting the argument above 15,
/// with the reflection formula for negative arguments.
fn gamma_stirling(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_stirling(1.0 - x));
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < 15.0 {
        prod *= z;
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z2 * z2 * z)
        - 1.0 / (1680.0 * z2 * z2 * z2 * z)
        + 1.0 / (1188.0 * z2 * z2 * z2 * z2 * z);
    let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    ln.exp() / prod
}

/// Cyclic Jacobi eigenvalues of a small symmetric matrix, ascending.
fn jacobi_eigenvalues(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn rate_set() -> impl Strategy<Value = RateSet> {
    (
        -0.2..0.2f64,
        -0.2..0.2f64,
        -0.3..0.3f64,
        -0.3..0.3f64,
        -0.05..0.05f64,
        -0.05..0.05f64,
        -0.9..0.9f64,
    )
        .prop_map(|(a, b, c, d, e, f, u)| RateSet {
            omega_lm: a,
            omega_mr: b,
            omega1_lm: c,
            omega1_mr: d,
            co_lm: e,
            co_mr: f,
            u,
            eps0: 0.5,
            eps1: 1.5,
        })
}

#[test]
fn gamma_matches_stirling_oracle() {
    let mut worst: f64 = 0.0;
    let mut x: f64 = -4.95;
    while x < 6.0 {
        if (x - x.round()).abs() > 1e-3 || x > 0.0 {
            let rel = (gamma(x) - gamma_stirling(x)).abs() / gamma_stirling(x).abs();
            worst = worst.max(rel);
        }
        x += 0.0137;
    }
    assert!(worst < 1e-12, "largest relative deviation {worst:e}");
}

proptest! {
    #[test]
    fn energy_increases_with_g(e1 in 1.0..1.999f64, e2 in 1.0..1.999f64) {
        prop_assume!((e1 - e2).abs() > 1e-9);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(g_from_energy(lo).unwrap() < g_from_energy(hi).unwrap());
    }

    #[test]
    fn energy_g_roundtrip(e in 1.001..1.999f64) {
        let g = g_from_energy(e).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert!((energy_from_g(g).unwrap() - e).abs() < 1e-10);
    }

    #[test]
    fn trajectory_ordering_and_bounds(total in 200.0..20000.0f64, u in 0.0..1.0f64) {
        let traj = TrajectoryParams::new(total).unwrap();
        let lay = traj.positions_at(u * total).unwrap();
        prop_assert!(lay.left < lay.middle && lay.middle < lay.right);
        for s in [lay.sep_lm(), lay.sep_mr()] {
            prop_assert!(s >= traj.d_min - 1e-12 && s <= traj.d_max + 1e-12);
        }
    }

    #[test]
    fn trajectory_mirror(total in 200.0..20000.0f64, u in 0.0..1.0f64) {
        let traj = TrajectoryParams::new(total).unwrap();
        let a = traj.positions_at(u * total).unwrap();
        let b = traj.positions_at(total - u * total).unwrap().mirrored();
        for (x, y) in a.centres().iter().zip(b.centres()) {
            prop_assert!((x - y).abs() < 1e-9 * total.max(1.0));
        }
    }

    #[test]
    fn trajectory_is_smooth(total in 500.0..20000.0f64, u in 0.01..0.99f64) {
        // Centred differences from the two sides of t agree: no kinks.
        let traj = TrajectoryParams::new(total).unwrap();
        let t = u * total;
        let h = 1e-3 * total;
        let sep = |t: f64| traj.separations_at(t).unwrap();
        let (l0, r0) = sep(t);
        let (lm, rm) = sep(t - h);
        let (lp, rp) = sep(t + h);
        let scale = traj.d_max - traj.d_min;
        prop_assert!(((lp - l0) - (l0 - lm)).abs() < 50.0 * scale * (h / total).powi(2));
        prop_assert!(((rp - r0) - (r0 - rm)).abs() < 50.0 * scale * (h / total).powi(2));
    }

    #[test]
    fn potential_minima(total in 200.0..20000.0f64, u in 0.0..1.0f64, x in -20.0..20.0f64) {
        let lay = TrajectoryParams::new(total).unwrap().positions_at(u * total).unwrap();
        prop_assert!(lay.potential(x) >= 0.0);
        for c in lay.centres() {
            prop_assert_eq!(lay.potential(c), 0.0);
        }
        // Continuity across the midpoints where the nearest well changes.
        for m in [0.5 * (lay.left + lay.middle), 0.5 * (lay.middle + lay.right)] {
            prop_assert!((lay.potential(m - 1e-9) - lay.potential(m + 1e-9)).abs() < 1e-7);
        }
    }

    #[test]
    fn hubbard_matrices_are_hermitian(r in rate_set()) {
        for m in [bose_hamiltonian(&r), fermi_hamiltonian(&r)] {
            prop_assert!((&m - m.transpose()).amax() == 0.0);
        }
    }

    #[test]
    fn hubbard_eigenvalues_match_jacobi(r in rate_set()) {
        for m in [bose_hamiltonian(&r), fermi_hamiltonian(&r)] {
            let (values, _) = sorted_eigh(&m).unwrap();
            for (a, b) in values.iter().zip(jacobi_eigenvalues(&m)) {
                prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn hubbard_spectrum_is_mirror_invariant(r in rate_set()) {
        let mirrored = RateSet {
            omega_lm: r.omega_mr,
            omega_mr: r.omega_lm,
            omega1_lm: r.omega1_mr,
            omega1_mr: r.omega1_lm,
            co_lm: r.co_mr,
            co_mr: r.co_lm,
            ..r
        };
        for (a, b) in [(bose_hamiltonian(&r), bose_hamiltonian(&mirrored)), (fermi_hamiltonian(&r), fermi_hamiltonian(&mirrored))] {
            let (ea, _) = sorted_eigh(&a).unwrap();
            let (eb, _) = sorted_eigh(&b).unwrap();
            for (x, y) in ea.iter().zip(&eb) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hubbard_spectrum_depends_on_rate_magnitudes(r in rate_set(), flip_lm in any::<bool>(), flip_mr in any::<bool>()) {
        // Mode phases a_L -> -a_L and a_R -> -a_R flip the single-particle
        // hops of a bond and leave pair hops unchanged. In the Fermi model
        // both bands of a site are flipped together.
        let s = |v: f64, f: bool| if f { -v } else { v };
        let flipped = RateSet {
            omega_lm: s(r.omega_lm, flip_lm),
            omega_mr: s(r.omega_mr, flip_mr),
            omega1_lm: s(r.omega1_lm, flip_lm),
            omega1_mr: s(r.omega1_mr, flip_mr),
            ..r
        };
        for (a, b) in [(bose_hamiltonian(&r), bose_hamiltonian(&flipped)), (fermi_hamiltonian(&r), fermi_hamiltonian(&flipped))] {
            let (ea, _) = sorted_eigh(&a).unwrap();
            let (eb, _) = sorted_eigh(&b).unwrap();
            for (x, y) in ea.iter().zip(&eb) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transition_estimate_is_gauge_invariant(p in 0.1..0.9f64, signs in proptest::collection::vec(any::<bool>(), 400)) {
        let lz = LandauZener::with_probability(p, 0.1).unwrap();
        // The coupling is Lorentzian; 40 widths bring the edges below 1e-3.
        let span = 40.0 * lz.crossing_width();
        let n = 2001;
        let times: Vec<f64> = (0..n).map(|k| -span + 2.0 * span * k as f64 / (n - 1) as f64).collect();
        let plain: Vec<SliceData> = times.iter().map(|&t| lz.slice(t)).collect();
        let scrambled: Vec<SliceData> = plain
            .iter()
            .enumerate()
            .map(|(s, d)| {
                let mut d = d.clone();
                for (k, v) in d.vectors.iter_mut().enumerate() {
                    if signs[(2 * s + k) % signs.len()] {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                d
            })
            .collect();
        let a = track_bands(plain, 1.0, None).unwrap();
        let b = track_bands(scrambled, 1.0, None).unwrap();
        let window = (times[0], times[n - 1]);
        let pa = transition_probability(&a, 0, 1, window, 1.0).unwrap();
        let pb = transition_probability(&b, 0, 1, window, 1.0).unwrap();
        prop_assert!((pa.p - pb.p).abs() < 1e-12);
        for &t in &[-0.03 * span, 0.0, 0.045 * span] {
            let ca = nonadiabatic_coupling(&a, 0, 1, t).unwrap();
            let cb = nonadiabatic_coupling(&b, 0, 1, t).unwrap();
            prop_assert!((ca.abs() - cb.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_is_antisymmetric(p in 0.05..0.95f64, u in -0.9..0.9f64) {
        let lz = LandauZener::with_probability(p, 0.1).unwrap();
        let flow = lz.flow(6.0).unwrap();
        let t = u * 6.0 * lz.crossing_width();
        let a = nonadiabatic_coupling(&flow, 0, 1, t).unwrap();
        let b = nonadiabatic_coupling(&flow, 1, 0, t).unwrap();
        prop_assert!((a + b).abs() < 1e-9 * a.abs().max(1e-6));
    }
}
