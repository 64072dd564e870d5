use lllforge_apps::latin::{f_value, g_value, gamma_root, q_max, reproduce_table};
use proptest::prelude::*;

const PUBLISHED: [(f64, f64, f64, f64); 15] = [
    (0.11, 0.994, 0.947, 0.993),
    (0.12, 0.981, 0.942, 0.979),
    (0.13, 0.969, 0.937, 0.966),
    (0.14, 0.958, 0.933, 0.955),
    (0.15, 0.948, 0.929, 0.945),
    (0.16, 0.939, 0.924, 0.935),
    (0.17, 0.930, 0.920, 0.926),
    (0.18, 0.922, 0.915, 0.918),
    (0.19, 0.915, 0.911, 0.911),
    (0.20, 0.909, 0.906, 0.904),
    (0.21, 0.903, 0.902, 0.898),
    (0.22, 0.898, 0.898, 0.891),
    (0.23, 0.893, 0.893, 0.886),
    (0.24, 0.889, 0.889, 0.880),
    (0.25, 0.885, 0.885, 0.875),
];

#[test]
fn table_rows_match() {
    let betas: Vec<f64> = PUBLISHED.iter().map(|r| r.0).collect();
    let rows = reproduce_table(&betas).unwrap();
    for (row, want) in rows.iter().zip(PUBLISHED) {
        assert!((row.theorem - want.1).abs() <= 0.001, "{row:?}");
        assert!((row.random - want.2).abs() <= 0.001, "{row:?}");
        assert!((row.partial_resampling - want.3).abs() <= 0.001, "{row:?}");
    }
}

#[test]
fn theorem_column_dominates_random() {
    let betas: Vec<f64> = (11..=25).map(|i| i as f64 / 100.0).collect();
    for row in reproduce_table(&betas).unwrap() {
        assert!(row.theorem >= row.random - 1e-12);
    }
}

proptest! {
    #[test]
    fn gamma_is_smallest_root(beta in 0.106f64..0.3, t in 0.0f64..1.0) {
        let q = t * q_max(beta).unwrap();
        let c = 2.0 * q - q * q;
        let g = gamma_root(beta, q).unwrap();
        let h = |x: f64| x - c * (1.0 + beta * x).powi(4);
        prop_assert!(h(g).abs() <= 1e-9);
        // No sign change on a grid below the root.
        for i in 0..200 {
            let x = g * i as f64 / 200.0;
            prop_assert!(h(x) <= 1e-9);
        }
    }

    #[test]
    fn g_dominates_sampled_f(beta in 0.106f64..0.3, t in 0.0f64..1.0) {
        let q = t * q_max(beta).unwrap();
        let g = g_value(beta).unwrap();
        prop_assert!(f_value(beta, q).unwrap() <= g.g + 1e-9);
    }
}
