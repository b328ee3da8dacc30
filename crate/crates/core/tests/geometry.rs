use activerays::geometry::ray_angle;
use activerays::{Point, PolarContour};
use proptest::prelude::*;

/// Radii from a handful of low Fourier modes around a base radius.
fn band_limited(n: usize, base: f64, modes: &[(f64, f64)]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = ray_angle(i, n);
            base + modes
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let f = (k + 1) as f64;
                    a * (f * t).cos() + b * (f * t).sin()
                })
                .sum::<f64>()
        })
        .collect()
}

proptest! {
    #[test]
    fn uniform_radii_are_equidistant(
        cx in -50.0f64..50.0, cy in -50.0f64..50.0, r in 0.1f64..40.0, n in 4usize..200
    ) {
        let center = Point::new(cx, cy);
        let c = PolarContour::circle(center, r, n, 40.0).unwrap();
        for p in c.to_cartesian() {
            prop_assert!((p.dist(center) - r).abs() < 1e-12);
        }
    }

    #[test]
    fn distinct_radii_give_distinct_vertices(
        radii in prop::collection::vec(0.5f64..20.0, 4..40), i in 0usize..40, bump in 0.01f64..1.0
    ) {
        let c = PolarContour::new(Point::new(3.0, 4.0), radii.clone(), 25.0).unwrap();
        let mut other = radii;
        let i = i % other.len();
        other[i] += bump;
        let d = c.with_radii(other).unwrap();
        prop_assert_ne!(c.to_cartesian(), d.to_cartesian());
    }

    #[test]
    fn resample_round_trip_band_limited(
        quarter in 2usize..16,
        factor in 2usize..5,
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let n = 4 * quarter;
        // modes strictly below n/4 survive both the coarser and finer grid
        let modes = &coeffs[..quarter - 1];
        let radii = band_limited(n, 20.0, modes);
        let c = PolarContour::new(Point::new(0.0, 0.0), radii, 40.0).unwrap();

        for target in [n * factor, n / 2] {
            let back = c.resample(target).unwrap().resample(n).unwrap();
            for (a, b) in back.radii().iter().zip(c.radii()) {
                prop_assert!((a - b).abs() < 1e-9, "via {}: {} vs {}", target, a, b);
            }
        }
    }
}

#[test]
fn resample_matches_analytic_profile_on_finer_grid() {
    let modes = [(1.5, -0.5), (0.0, 0.75), (0.25, 0.0)];
    let c = PolarContour::new(Point::new(1.0, 2.0), band_limited(16, 10.0, &modes), 20.0).unwrap();
    let fine = c.resample(100).unwrap();
    let exact = band_limited(100, 10.0, &modes);
    for (a, b) in fine.radii().iter().zip(&exact) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn resample_keeps_radii_within_cap() {
    // A square profile overshoots under band-limited interpolation.
    let radii: Vec<f64> = (0..16).map(|i| if i % 8 < 4 { 10.0 } else { 2.0 }).collect();
    let c = PolarContour::new(Point::new(0.0, 0.0), radii, 10.0).unwrap();
    let r = c.resample(64).unwrap();
    assert!(r.radii().iter().all(|&v| v > 0.0 && v <= 10.0));
}
