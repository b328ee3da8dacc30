#![allow(dead_code)]

use activerays::{EnergyLandscape, Field, Point, PolarContour, Shape, ShapeSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform noise in `[0, scale)` blurred with `sigma`.
pub fn smooth_noise(rng: &mut ChaCha8Rng, h: usize, w: usize, scale: f64, sigma: f64) -> Field {
    Field::from_fn(h, w, |_, _| rng.gen::<f64>() * scale).gaussian_blur(sigma)
}

pub fn random_landscape(rng: &mut ChaCha8Rng, n: usize) -> EnergyLandscape {
    let d = smooth_noise(rng, n, n, 20.0, 2.0);
    let beta = smooth_noise(rng, n, n, 1.0, 2.0);
    let kappa = smooth_noise(rng, n, n, 1.0, 2.0);
    EnergyLandscape::new(d, beta, kappa).unwrap()
}

pub fn random_contour(rng: &mut ChaCha8Rng, vertices: usize) -> PolarContour {
    let center = Point::new(rng.gen_range(28.0..36.0), rng.gen_range(28.0..36.0));
    let radii = (0..vertices).map(|_| rng.gen_range(4.0..20.0)).collect();
    PolarContour::new(center, radii, 25.0).unwrap()
}

/// Star-shaped simple polygon around `center`.
pub fn random_star_polygon(rng: &mut ChaCha8Rng, center: Point, k: usize) -> Shape {
    let vertices = (0..k)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + rng.gen_range(0.1..0.9)) / k as f64;
            let r = rng.gen_range(10.0..22.0);
            [center.x + r * t.cos(), center.y + r * t.sin()]
        })
        .collect();
    Shape::Polygon { vertices }
}

pub fn oracle_shapes(rng: &mut ChaCha8Rng) -> Vec<(String, ShapeSpec)> {
    let mut shapes = vec![
        (
            "disk".to_string(),
            Shape::Disk { center: [32.0, 32.0], radius: 20.0 },
        ),
        (
            "rectangle".to_string(),
            Shape::Rectangle { min: [16.0, 16.0], max: [48.0, 48.0] },
        ),
        (
            "rounded rectangle".to_string(),
            Shape::RoundedRectangle { min: [14.0, 18.0], max: [50.0, 46.0], radius: 6.0 },
        ),
    ];
    for k in 0..3 {
        shapes.push((
            format!("polygon {k}"),
            random_star_polygon(rng, Point::new(32.0, 32.0), 7 + 2 * k),
        ));
    }
    shapes
        .into_iter()
        .map(|(name, s)| (name, ShapeSpec::new(s, 64, 64).unwrap()))
        .collect()
}
