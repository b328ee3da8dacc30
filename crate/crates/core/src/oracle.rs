//! Analytic landscapes built from known shapes, so contour evolution can be
//! checked end to end without a learned landscape producer.
//!
//! `D` is the unsigned distance to the shape boundary (optionally blurred),
//! `β` is constant and `κ` is constant inside the shape and zero outside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::Point;
use crate::landscape::EnergyLandscape;
use crate::raster::{edge_crossing, rasterize_polygon, Mask};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    /// Axis-aligned `[min.x, max.x] x [min.y, max.y]`.
    Rectangle { min: [f64; 2], max: [f64; 2] },
    RoundedRectangle {
        min: [f64; 2],
        max: [f64; 2],
        radius: f64,
    },
    /// Simple polygon, vertices in order, implicitly closed.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// A validated shape on an `H x W` image.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    shape: Shape,
    height: usize,
    width: usize,
    outline: Option<Vec<Point>>,
}

fn pt(a: [f64; 2]) -> Point {
    Point::new(a[0], a[1])
}

impl ShapeSpec {
    pub fn new(shape: Shape, height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidShape(format!("empty image {height}x{width}")));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let (bb_min, bb_max, outline) = match &shape {
            Shape::Disk { center, radius } => {
                if !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::DegenerateShape(format!("disk radius {radius}")));
                }
                let c = pt(*center);
                (
                    Point::new(c.x - radius, c.y - radius),
                    Point::new(c.x + radius, c.y + radius),
                    None,
                )
            }
            Shape::Rectangle { min, max } => {
                check_box(*min, *max)?;
                let outline = vec![
                    Point::new(min[0], min[1]),
                    Point::new(max[0], min[1]),
                    Point::new(max[0], max[1]),
                    Point::new(min[0], max[1]),
                ];
                (pt(*min), pt(*max), Some(outline))
            }
            Shape::RoundedRectangle { min, max, radius } => {
                check_box(*min, *max)?;
                let half = 0.5 * (max[0] - min[0]).min(max[1] - min[1]);
                if !(*radius >= 0.0 && *radius <= half) {
                    return Err(Error::InvalidShape(format!(
                        "corner radius {radius} outside [0, {half}]"
                    )));
                }
                (pt(*min), pt(*max), None)
            }
            Shape::Polygon { vertices } => {
                let pts: Vec<Point> = vertices.iter().copied().map(pt).collect();
                if pts.len() < 3 || !pts.iter().all(|p| p.x.is_finite() && p.y.is_finite()) {
                    return Err(Error::DegenerateShape(format!(
                        "polygon with {} vertices",
                        pts.len()
                    )));
                }
                if shoelace(&pts).abs() < 1e-12 {
                    return Err(Error::DegenerateShape("polygon has zero area".into()));
                }
                if !is_simple(&pts) {
                    return Err(Error::InvalidShape("polygon self-intersects".into()));
                }
                let lo = pts.iter().fold(Point::new(f64::INFINITY, f64::INFINITY), |a, p| {
                    Point::new(a.x.min(p.x), a.y.min(p.y))
                });
                let hi = pts
                    .iter()
                    .fold(Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, p| {
                        Point::new(a.x.max(p.x), a.y.max(p.y))
                    });
                (lo, hi, Some(pts))
            }
        };
        let overlaps = bb_min.x < width as f64
            && bb_max.x > 0.0
            && bb_min.y < height as f64
            && bb_max.y > 0.0;
        if !overlaps {
            return Err(Error::InvalidShape(format!(
                "shape does not intersect the {height}x{width} image"
            )));
        }
        Ok(Self {
            shape,
            height,
            width,
            outline,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Unsigned Euclidean distance from `p` to the shape boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match (&self.shape, &self.outline) {
            (Shape::Disk { center, radius }, _) => (p.dist(pt(*center)) - radius).abs(),
            (Shape::RoundedRectangle { min, max, radius }, _) => {
                rounded_box_sdf(p, *min, *max, *radius).abs()
            }
            (_, Some(outline)) => {
                let n = outline.len();
                (0..n)
                    .map(|i| segment_distance(p, outline[i], outline[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => unreachable!("polygonal shapes carry an outline"),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match (&self.shape, &self.outline) {
            (Shape::Disk { center, radius }, _) => {
                let (dx, dy) = (p.x - center[0], p.y - center[1]);
                dx * dx + dy * dy <= radius * radius
            }
            (Shape::RoundedRectangle { min, max, radius }, _) => {
                rounded_box_sdf(p, *min, *max, *radius) <= 0.0
            }
            (_, Some(outline)) => {
                let n = outline.len();
                let crossings = (0..n)
                    .filter_map(|i| edge_crossing(outline[i], outline[(i + 1) % n], p.y))
                    .filter(|&x| x > p.x)
                    .count();
                crossings % 2 == 1
            }
            _ => unreachable!("polygonal shapes carry an outline"),
        }
    }
}

fn check_box(min: [f64; 2], max: [f64; 2]) -> Result<()> {
    if !(min.iter().chain(&max).all(|v| v.is_finite())) || !(max[0] > min[0] && max[1] > min[1]) {
        return Err(Error::DegenerateShape(format!(
            "box {min:?}..{max:?} has no area"
        )));
    }
    Ok(())
}

fn shoelace(pts: &[Point]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, p: Point, d: f64| {
        d == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn is_simple(pts: &[Point]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_touch(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

/// Signed distance to a rounded box; negative inside.
fn rounded_box_sdf(p: Point, min: [f64; 2], max: [f64; 2], radius: f64) -> f64 {
    let cx = 0.5 * (min[0] + max[0]);
    let cy = 0.5 * (min[1] + max[1]);
    let qx = (p.x - cx).abs() - (0.5 * (max[0] - min[0]) - radius);
    let qy = (p.y - cy).abs() - (0.5 * (max[1] - min[1]) - radius);
    let outside = qx.max(0.0).hypot(qy.max(0.0));
    outside + qx.max(qy).min(0.0) - radius
}

/// Synthesis parameters plus the shape, as read from a JSON spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub height: usize,
    pub width: usize,
    pub shape: Shape,
    #[serde(default = "defaults::d_scale")]
    pub d_scale: f64,
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    #[serde(default = "defaults::kappa")]
    pub kappa: f64,
    #[serde(default = "defaults::blur_sigma")]
    pub blur_sigma: f64,
}

mod defaults {
    pub fn d_scale() -> f64 {
        1.0
    }
    pub fn beta() -> f64 {
        0.2
    }
    pub fn kappa() -> f64 {
        0.3
    }
    pub fn blur_sigma() -> f64 {
        1.0
    }
}

impl SynthSpec {
    pub fn shape_spec(&self) -> Result<ShapeSpec> {
        ShapeSpec::new(self.shape.clone(), self.height, self.width)
    }

    pub fn landscape(&self) -> Result<EnergyLandscape> {
        synth_landscape(
            &self.shape_spec()?,
            self.d_scale,
            self.beta,
            self.kappa,
            self.blur_sigma,
        )
    }
}

pub fn synth_landscape(
    shape: &ShapeSpec,
    d_scale: f64,
    beta_const: f64,
    kappa_const: f64,
    blur_sigma: f64,
) -> Result<EnergyLandscape> {
    let params = [
        ("d_scale", d_scale, d_scale > 0.0),
        ("beta", beta_const, beta_const >= 0.0),
        ("kappa", kappa_const, kappa_const >= 0.0),
        ("blur_sigma", blur_sigma, blur_sigma >= 0.0),
    ];
    for (name, v, ok) in params {
        if !ok || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} = {v}")));
        }
    }
    let (h, w) = (shape.height, shape.width);
    let d = Field::from_fn(h, w, |x, y| d_scale * shape.boundary_distance(Point::new(x, y)))
        .gaussian_blur(blur_sigma);
    let beta = Field::constant(h, w, beta_const);
    let kappa = Field::from_fn(h, w, |x, y| {
        if shape.contains(Point::new(x, y)) {
            kappa_const
        } else {
            0.0
        }
    });
    EnergyLandscape::new(d, beta, kappa)
}

/// Pixel-center membership mask, matching the rasterizer's conventions.
pub fn gt_mask(shape: &ShapeSpec) -> Mask {
    match &shape.outline {
        Some(outline) => rasterize_polygon(outline, shape.height, shape.width).mask,
        None => Mask::from_fn(shape.height, shape.width, |r, c| {
            shape.contains(Point::new(c as f64 + 0.5, r as f64 + 0.5))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk() -> ShapeSpec {
        ShapeSpec::new(
            Shape::Disk {
                center: [32.0, 32.0],
                radius: 20.0,
            },
            64,
            64,
        )
        .unwrap()
    }

    fn square() -> ShapeSpec {
        ShapeSpec::new(
            Shape::Rectangle {
                min: [16.0, 16.0],
                max: [48.0, 48.0],
            },
            64,
            64,
        )
        .unwrap()
    }

    #[test]
    fn disk_distances() {
        let land = synth_landscape(&disk(), 1.5, 0.2, 0.3, 0.0).unwrap();
        assert_eq!(land.d_at(Point::new(52.0, 32.0)), 0.0);
        assert_eq!(land.d_at(Point::new(32.0, 32.0)), 30.0);
        assert_eq!(land.kappa_at(Point::new(32.0, 32.0)), 0.3);
        assert_eq!(land.kappa_at(Point::new(2.0, 2.0)), 0.0);
        assert!(land.beta_map().data().iter().all(|&b| b == 0.2));
    }

    #[test]
    fn rectangle_corner_distance() {
        let land = synth_landscape(&square(), 1.0, 0.0, 0.0, 0.0).unwrap();
        let expected = (16.0f64 * 16.0 * 2.0).sqrt();
        assert!((land.d_at(Point::new(0.0, 0.0)) - expected).abs() < 1e-12);
        assert!((expected - 22.627).abs() < 1e-3);
    }

    #[test]
    fn minimum_sits_on_the_boundary() {
        let shapes = [
            disk(),
            square(),
            ShapeSpec::new(
                Shape::RoundedRectangle {
                    min: [10.3, 12.7],
                    max: [50.1, 41.9],
                    radius: 6.0,
                },
                64,
                64,
            )
            .unwrap(),
        ];
        for s in shapes {
            let land = synth_landscape(&s, 1.0, 0.1, 0.1, 0.0).unwrap();
            assert!(land.data_map().min() <= 0.5f64.sqrt() + 1e-12);
            assert!(land.data_map().min() >= 0.0);
        }
    }

    #[test]
    fn distance_grows_along_rays_from_boundary() {
        let s = disk();
        let mut prev = 0.0;
        for k in 0..12 {
            let d = s.boundary_distance(Point::new(52.0 + k as f64, 32.0));
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn disk_mask_area() {
        let n = gt_mask(&disk()).count() as f64;
        assert!((n - PI * 400.0).abs() / (PI * 400.0) < 0.03);
    }

    #[test]
    fn aligned_rectangle_mask_is_exact() {
        let m = gt_mask(&square());
        assert_eq!(m.count(), 32 * 32);
        let brute = Mask::from_fn(64, 64, |r, c| (16..48).contains(&r) && (16..48).contains(&c));
        assert_eq!(m, brute);
    }

    #[test]
    fn invalid_shapes() {
        let zero = Shape::Disk {
            center: [32.0, 32.0],
            radius: 0.0,
        };
        assert!(matches!(ShapeSpec::new(zero, 64, 64), Err(Error::DegenerateShape(_))));
        let flat = Shape::Rectangle {
            min: [5.0, 5.0],
            max: [5.0, 9.0],
        };
        assert!(matches!(ShapeSpec::new(flat, 64, 64), Err(Error::DegenerateShape(_))));
        let off = Shape::Disk {
            center: [-40.0, 10.0],
            radius: 5.0,
        };
        assert!(matches!(ShapeSpec::new(off, 64, 64), Err(Error::InvalidShape(_))));
        let bowtie = Shape::Polygon {
            vertices: vec![[10.0, 10.0], [40.0, 30.0], [40.0, 10.0], [10.0, 20.0]],
        };
        assert!(matches!(ShapeSpec::new(bowtie, 64, 64), Err(Error::InvalidShape(_))));
        let collinear = Shape::Polygon {
            vertices: vec![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]],
        };
        assert!(matches!(ShapeSpec::new(collinear, 64, 64), Err(Error::DegenerateShape(_))));
    }

    #[test]
    fn synth_spec_defaults_from_json() {
        let spec: SynthSpec = serde_json::from_str(
            r#"{"height":64,"width":64,"shape":{"kind":"disk","center":[32,32],"radius":20}}"#,
        )
        .unwrap();
        assert_eq!((spec.d_scale, spec.beta, spec.kappa, spec.blur_sigma), (1.0, 0.2, 0.3, 1.0));
        let land = spec.landscape().unwrap();
        assert_eq!(land.height(), 64);
        assert!(land.data_map().min() >= 0.0);
    }
}
