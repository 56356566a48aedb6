use nalgebra::{DMatrix, SymmetricEigen};

use sap_sim::spectral::{
    build_adaptive_flow, detect_crossings, scan_transition_map, track_bands, transition_probability, AdaptiveSettings,
    CrossingCriteria, DarkFlow, LandauZener, SliceData,
};
use sap_sim::Error;

/// Three-level sweep with two avoided crossings of different gaps.
fn three_level(t: f64) -> SliceData {
    let h = DMatrix::from_row_slice(3, 3, &[0.02 * t, 0.01, 0.0, 0.01, 0.0, 0.03, 0.0, 0.03, 1.0 - 0.02 * t]);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    SliceData {
        time: t,
        energies: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect(),
    }
}

#[test]
fn landau_zener_crossing_has_the_model_gap() {
    let lz = LandauZener::new(0.05, 0.1).unwrap();
    let flow = lz.flow(50.0).unwrap();
    let events = detect_crossings(&flow, 0, CrossingCriteria { gap_threshold: 1.0, min_rise: 0.1 }).unwrap();
    assert_eq!(events.len(), 1);
    assert!((events[0].gap - 0.2).abs() < 1e-3, "gap {}", events[0].gap);
    assert!(events[0].time.abs() < 0.05 * lz.crossing_width());
}

#[test]
fn truncated_window_is_rejected() {
    let lz = LandauZener::new(0.05, 0.1).unwrap();
    let flow = lz.flow(50.0).unwrap();
    let w = lz.crossing_width();
    match transition_probability(&flow, 0, 1, (-2.0 * w, 2.0 * w), 1.0) {
        Err(Error::WindowTooNarrow { ratio, .. }) => assert!(ratio > 1e-3),
        other => panic!("expected a window error, got {other:?}"),
    }
}

#[test]
fn estimates_fall_with_slower_sweeps() {
    let lz = LandauZener::new(0.05, 0.1).unwrap();
    let cells = scan_transition_map(&[1.0], &[1.0, 2.0, 4.0], |_| {
        Ok(DarkFlow {
            flow: lz.flow(200.0)?,
            track: 0,
            total_time: 1.0,
            criteria: CrossingCriteria { gap_threshold: 1.0, min_rise: 0.1 },
        })
    })
    .unwrap();
    assert_eq!(cells.len(), 3);
    let p: Vec<f64> = cells.iter().map(|c| c.p.unwrap()).collect();
    assert!(p[0] > p[1] && p[1] > p[2], "{p:?}");
}

#[test]
fn reversed_slices_give_mirrored_tracks() {
    let times: Vec<f64> = (0..=400).map(|k| -40.0 + 0.2 * k as f64 + 25.0).collect();
    let forward = track_bands(times.iter().map(|&t| three_level(t)).collect(), 1.0, None).unwrap();
    let backward = track_bands(
        times.iter().rev().map(|&t| SliceData { time: -t, ..three_level(t) }).collect(),
        1.0,
        None,
    )
    .unwrap();
    let n = times.len();
    // Tracks are numbered by energy at each flow's first slice, so the
    // reversed flow is a permutation of the forward one.
    for k in 0..3 {
        let b = backward.track(k);
        let matched = (0..3).any(|j| {
            let f = forward.track(j);
            (0..n).all(|s| (f[s] - b[n - 1 - s]).abs() < 1e-12)
        });
        assert!(matched, "reversed track {k} has no forward counterpart");
    }
}

#[test]
fn adaptive_flow_resolves_a_narrow_crossing() {
    // Gap 2e-4 over a span of 200: fixed coarse steps would jump it.
    let lz = LandauZener::new(1.0, 1e-4).unwrap();
    let mut src = |t: f64| Ok(lz.slice(t));
    let mut settings = AdaptiveSettings::for_span(200.0);
    settings.resolve = vec![0];
    settings.crossing_floor = 1e-9;
    let flow = build_adaptive_flow(&mut src, -100.0, 100.0, None, &settings).unwrap();
    let events = detect_crossings(&flow, 0, CrossingCriteria { gap_threshold: 1.0, min_rise: 0.1 }).unwrap();
    assert_eq!(events.len(), 1);
    assert!(events[0].gap < 2.5e-4, "gap {}", events[0].gap);
}
