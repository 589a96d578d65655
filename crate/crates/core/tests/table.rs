use yamabe_core::products::table_dims;
use yamabe_core::*;

/// `(m, n, sigma^{-1}, Y^inf, Y_{m+n})` reference values.
const REFERENCE: [(usize, usize, f64, f64, f64); 21] = [
    (2, 2, 2.41877, 59.40481, 61.56239),
    (2, 3, 3.87947, 75.39687, 78.99686),
    (3, 2, 2.11360, 78.18644, 78.99686),
    (2, 4, 5.66408, 91.68339, 96.29728),
    (3, 3, 3.19925, 94.71444, 96.29728),
    (4, 2, 1.90282, 95.87367, 96.29728),
    (2, 5, 7.71937, 108.1625, 113.5272),
    (3, 4, 4.53960, 111.2934, 113.5272),
    (4, 3, 2.75810, 112.6214, 113.5272),
    (5, 2, 1.75469, 113.2670, 113.5272),
    (2, 6, 10.0021, 124.7747, 130.7157),
    (3, 5, 6.10843, 127.9414, 130.7157),
    (4, 4, 3.81586, 129.3551, 130.7157),
    (5, 3, 2.45567, 130.1272, 130.7157),
    (6, 2, 1.64650, 130.5398, 130.7157),
    (2, 7, 12.4764, 141.4740, 147.8778),
    (3, 6, 7.88171, 144.6521, 147.8778),
    (4, 5, 5.06274, 146.1089, 147.8778),
    (5, 4, 3.32083, 146.9519, 147.8778),
    (6, 3, 2.23778, 147.4615, 147.8778),
    (7, 2, 1.56455, 147.7507, 147.8778),
];

fn table() -> Vec<ConstantsRow> {
    build_table(9, &TableControls::default()).unwrap().into_iter().map(|r| r.expect("row computed")).collect()
}

#[test]
fn order_and_size() {
    let dims: Vec<(usize, usize)> = table_dims(9).iter().map(|d| (d.m(), d.n())).collect();
    let want: Vec<(usize, usize)> = REFERENCE.iter().map(|r| (r.0, r.1)).collect();
    assert_eq!(dims, want);
    assert_eq!(table_dims(4).len(), 1);
    assert!(build_table(3, &TableControls::default()).is_err());
}

#[test]
fn matches_reference_values() {
    for (row, &(m, n, s, y, ys)) in table().iter().zip(REFERENCE.iter()) {
        assert_eq!((row.m, row.n), (m, n));
        assert!((row.sigma_inv - s).abs() < 5e-4, "({m},{n}) sigma_inv {}", row.sigma_inv);
        assert!((row.y_inf - y).abs() < 5e-3, "({m},{n}) y_inf {}", row.y_inf);
        assert!((row.y_sphere - ys).abs() < 5e-4, "({m},{n}) y_sphere {}", row.y_sphere);
    }
}

#[test]
fn structural_patterns() {
    let rows = table();
    for r in &rows {
        assert!(r.below_sphere(), "({}, {})", r.m, r.n);
        assert!(r.alpha0 > 1.0);
    }
    // Fixed k: sigma^{-1} decreases as n decreases, Y^inf increases.
    for k in 5..=9 {
        let row_k: Vec<_> = rows.iter().filter(|r| r.m + r.n == k).collect();
        for w in row_k.windows(2) {
            assert!(w[1].sigma_inv < w[0].sigma_inv);
            assert!(w[1].y_inf > w[0].y_inf);
        }
    }
    // Fixed n: sigma^{-1} decreases with m.
    for n in 2..=7 {
        let col: Vec<_> = rows.iter().filter(|r| r.n == n).collect();
        for w in col.windows(2) {
            assert!(w[1].sigma_inv < w[0].sigma_inv, "n={n}");
        }
    }
}

#[test]
fn table_is_deterministic() {
    let a = table();
    let b = table();
    assert_eq!(a, b);
}
