use std::fs;
use std::path::PathBuf;

use activerays::geometry::{read_contour_csv, write_contour_csv};
use activerays::landscape::{read_emap, write_emap};
use activerays::{EnergyLandscape, Field, Point};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn emap_golden_file() {
    let bytes = fs::read(fixture("tiny.emap")).unwrap();
    let land = read_emap(bytes.as_slice()).unwrap();
    assert_eq!((land.height(), land.width()), (2, 3));
    let d: Vec<f64> = [0.0f32, 0.5, 1.25, 2.0, 3.75, 100.0].iter().map(|&v| v as f64).collect();
    let beta: Vec<f64> = [0.2f32, 0.2, 0.2, 0.0, 1.0, 0.2].iter().map(|&v| v as f64).collect();
    let kappa: Vec<f64> = [0.3f32, 0.0, 0.3, 0.0, 0.3, 1e-3].iter().map(|&v| v as f64).collect();
    assert_eq!(land.data_map().data(), d.as_slice());
    assert_eq!(land.beta_map().data(), beta.as_slice());
    assert_eq!(land.kappa_map().data(), kappa.as_slice());
    // gradients are recomputed on load
    assert_eq!(land.grad_x().get(0, 1), 0.5 * (1.25 - 0.0));
    assert_eq!(land.grad_y().get(1, 2), 100.0 - 1.25);

    let mut out = Vec::new();
    write_emap(&mut out, &land).unwrap();
    assert_eq!(out, bytes);
}

#[test]
fn csv_golden_file() {
    let text = fs::read_to_string(fixture("vertices.csv")).unwrap();
    let pts = read_contour_csv(text.as_bytes()).unwrap();
    let expected = vec![
        Point::new(12.5, 7.25),
        Point::new(-3.0, 0.1),
        Point::new(1e-7, 1e6),
        Point::new(31.999999999999996, -0.5),
    ];
    assert_eq!(pts, expected);
    let mut out = Vec::new();
    write_contour_csv(&mut out, &pts).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), text);
}

fn field_strategy(h: usize, w: usize) -> impl Strategy<Value = Field> {
    prop::collection::vec(0.0f32..1e4, h * w)
        .prop_map(move |v| Field::new(h, w, v.into_iter().map(f64::from).collect()).unwrap())
}

proptest! {
    #[test]
    fn emap_round_trip_is_exact(
        (d, b, k) in (1usize..6, 1usize..6).prop_flat_map(|(h, w)| {
            (field_strategy(h, w), field_strategy(h, w), field_strategy(h, w))
        })
    ) {
        let land = EnergyLandscape::new(d, b, k).unwrap();
        let mut bytes = Vec::new();
        write_emap(&mut bytes, &land).unwrap();
        let back = read_emap(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back, &land);
        let mut again = Vec::new();
        write_emap(&mut again, &back).unwrap();
        prop_assert_eq!(again, bytes);
    }

    #[test]
    fn csv_round_trip_is_exact(
        coords in prop::collection::vec((any::<f32>(), any::<f32>()), 0..40)
    ) {
        let pts: Vec<Point> = coords
            .into_iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| Point::new(x as f64, y as f64))
            .collect();
        let mut buf = Vec::new();
        write_contour_csv(&mut buf, &pts).unwrap();
        prop_assert_eq!(read_contour_csv(buf.as_slice()).unwrap(), pts);
    }
}
