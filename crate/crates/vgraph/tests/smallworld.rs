//! End-to-end small-world behavior on synthetic noise: average path length
//! grows logarithmically in the window size.

use vgraph::dfa::log_spaced_integers;
use vgraph::metrics::small_world_scan;
use vgraph::series::{generate, SyntheticKind, SyntheticSpec};

#[test]
fn noise_vg_path_length_grows_logarithmically() {
    let series = generate(&SyntheticSpec {
        kind: SyntheticKind::Fgn { hurst: 0.5 },
        length: 8192,
        seed: 314,
    })
    .unwrap();
    let grid = log_spaced_integers(10, 500, 12);
    let scan = small_world_scan(&series, &grid).unwrap();

    let fit = scan.fit_small.expect("all lengths are <= 500");
    assert!(fit.slope > 0.0, "slope {}", fit.slope);
    assert!(fit.pearson_r > 0.9, "r {}", fit.pearson_r);
    assert_eq!(fit.n, scan.points.len());

    // window bookkeeping: floor(T/N) windows averaged at every length
    for p in &scan.points {
        assert_eq!(p.windows, 8192 / p.window_len);
        assert!(p.mean_path_length >= 1.0);
    }
}

#[test]
fn persistent_noise_behaves_the_same_way() {
    let series = generate(&SyntheticSpec {
        kind: SyntheticKind::Fgn { hurst: 0.8 },
        length: 4096,
        seed: 11,
    })
    .unwrap();
    let grid = log_spaced_integers(10, 400, 8);
    let scan = small_world_scan(&series, &grid).unwrap();
    let fit = scan.fit_small.unwrap();
    assert!(fit.slope > 0.0);
    assert!(fit.pearson_r > 0.85, "r {}", fit.pearson_r);
}
