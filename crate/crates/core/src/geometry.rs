//! Polar contour representation.
//!
//! A contour is a reference point plus `L` radii measured along rays at the
//! fixed angles `i * 2π / L`, counter-clockwise from the positive x-axis.
//! Coordinates are raster coordinates (x = column, y = row) but nothing in
//! this module depends on the raster orientation.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest vertex count that still describes a closed, non-degenerate contour.
pub const MIN_VERTICES: usize = 4;

/// Default number of rays.
pub const DEFAULT_VERTICES: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Upper bound on each radius.
#[derive(Debug, Clone, PartialEq)]
pub enum RayCap {
    /// One cap shared by every ray.
    Global(f64),
    /// An individual cap per ray, indexed like the radii.
    PerRay(Vec<f64>),
}

impl RayCap {
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        match self {
            RayCap::Global(c) => *c,
            RayCap::PerRay(caps) => caps[i],
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            RayCap::Global(c) => *c,
            RayCap::PerRay(caps) => caps.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Cap derived from the sampling domain `[0, W-1] x [0, H-1]` of an image.
    ///
    /// `Global` uses the distance from `center` to the nearest domain edge;
    /// `PerRay` uses the distance along each ray to where it leaves the domain.
    pub fn for_image(
        mode: CapMode,
        center: Point,
        vertices: usize,
        height: usize,
        width: usize,
    ) -> Result<Self> {
        let x_hi = width.saturating_sub(1) as f64;
        let y_hi = height.saturating_sub(1) as f64;
        let inside = center.x > 0.0 && center.x < x_hi && center.y > 0.0 && center.y < y_hi;
        if !inside {
            return Err(Error::InvalidInitialization(format!(
                "center ({}, {}) is not strictly inside the {height}x{width} image domain",
                center.x, center.y
            )));
        }
        match mode {
            CapMode::Global => {
                let d = center.x.min(x_hi - center.x).min(center.y).min(y_hi - center.y);
                Ok(RayCap::Global(d))
            }
            CapMode::PerRay => {
                if vertices < MIN_VERTICES {
                    return Err(Error::InvalidArgument(format!(
                        "vertex count {vertices} is below {MIN_VERTICES}"
                    )));
                }
                let caps = (0..vertices)
                    .map(|i| {
                        let (s, c) = ray_angle(i, vertices).sin_cos();
                        exit_distance(center.x, c, x_hi).min(exit_distance(center.y, s, y_hi))
                    })
                    .collect();
                Ok(RayCap::PerRay(caps))
            }
        }
    }
}

impl From<f64> for RayCap {
    fn from(c: f64) -> Self {
        RayCap::Global(c)
    }
}

/// Distance along one axis from `start` moving with direction component `dir`
/// until leaving `[0, hi]`.
fn exit_distance(start: f64, dir: f64, hi: f64) -> f64 {
    if dir > 1e-12 {
        (hi - start) / dir
    } else if dir < -1e-12 {
        -start / dir
    } else {
        f64::INFINITY
    }
}

/// How the per-ray radius cap is derived from the image extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapMode {
    #[default]
    Global,
    PerRay,
}

/// Angle of ray `i` out of `vertices`.
#[inline]
pub fn ray_angle(i: usize, vertices: usize) -> f64 {
    i as f64 * TAU / vertices as f64
}

/// Unit direction of every ray.
pub fn ray_directions(vertices: usize) -> Vec<Point> {
    (0..vertices)
        .map(|i| {
            let (s, c) = ray_angle(i, vertices).sin_cos();
            Point::new(c, s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarContour {
    center: Point,
    radii: Vec<f64>,
    cap: RayCap,
}

impl PolarContour {
    pub fn new(center: Point, radii: Vec<f64>, cap: impl Into<RayCap>) -> Result<Self> {
        let cap = cap.into();
        let contour = Self { center, radii, cap };
        contour.validate()?;
        Ok(contour)
    }

    /// Circle of constant radius.
    pub fn circle(
        center: Point,
        radius: f64,
        vertices: usize,
        cap: impl Into<RayCap>,
    ) -> Result<Self> {
        let cap = cap.into();
        if !(radius > 0.0) || radius > cap.min() {
            return Err(Error::InvalidInitialization(format!(
                "radius {radius} outside (0, {}]",
                cap.min()
            )));
        }
        Self::new(center, vec![radius; vertices], cap)
    }

    fn validate(&self) -> Result<()> {
        let n = self.radii.len();
        if n < MIN_VERTICES {
            return Err(Error::InvalidContour(format!(
                "{n} vertices, need at least {MIN_VERTICES}"
            )));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::InvalidContour("non-finite center".into()));
        }
        match &self.cap {
            RayCap::Global(c) if !(c.is_finite() && *c > 0.0) => {
                return Err(Error::InvalidContour(format!("cap {c} must be positive")));
            }
            RayCap::PerRay(caps) if caps.len() != n => {
                return Err(Error::InvalidContour(format!(
                    "{} per-ray caps for {n} rays",
                    caps.len()
                )));
            }
            _ => {}
        }
        for (i, &r) in self.radii.iter().enumerate() {
            let cap = self.cap.get(i);
            if !(r > 0.0 && r <= cap) {
                return Err(Error::InvalidContour(format!(
                    "radius {r} at ray {i} outside (0, {cap}]"
                )));
            }
        }
        Ok(())
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn cap(&self) -> &RayCap {
        &self.cap
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn delta_theta(&self) -> f64 {
        TAU / self.radii.len() as f64
    }

    /// Same rays and cap, new radii.
    pub fn with_radii(&self, radii: Vec<f64>) -> Result<Self> {
        Self::new(self.center, radii, self.cap.clone())
    }

    /// Vertex `i` in Cartesian coordinates.
    pub fn vertex(&self, i: usize) -> Point {
        let (s, c) = ray_angle(i, self.radii.len()).sin_cos();
        let r = self.radii[i];
        Point::new(self.center.x + r * c, self.center.y + r * s)
    }

    pub fn to_cartesian(&self) -> Vec<Point> {
        (0..self.radii.len()).map(|i| self.vertex(i)).collect()
    }

    /// Resample onto `new_len` rays by trigonometric (band-limited)
    /// interpolation of the periodic radius profile.
    ///
    /// Passes through the original radii wherever a new ray coincides with an
    /// old one. Modes above the coarser of the two Nyquist limits are dropped.
    /// Results are clamped into `(0, cap]` so Gibbs overshoot on sharp profiles
    /// cannot produce an invalid contour.
    pub fn resample(&self, new_len: usize) -> Result<Self> {
        if new_len < MIN_VERTICES {
            return Err(Error::InvalidArgument(format!(
                "resample target {new_len} is below {MIN_VERTICES}"
            )));
        }
        let n = self.radii.len();
        if new_len == n {
            return Ok(self.clone());
        }
        let profile = Fourier::analyze(&self.radii, new_len);
        let cap = match &self.cap {
            RayCap::Global(c) => RayCap::Global(*c),
            RayCap::PerRay(caps) => {
                let caps_profile = Fourier::analyze(caps, new_len);
                RayCap::PerRay(
                    (0..new_len)
                        .map(|k| caps_profile.eval(ray_angle(k, new_len)))
                        .collect(),
                )
            }
        };
        let floor = self.radii.iter().copied().fold(f64::INFINITY, f64::min) * 1e-3;
        let radii = (0..new_len)
            .map(|k| profile.eval(ray_angle(k, new_len)).clamp(floor, cap.get(k)))
            .collect();
        Self::new(self.center, radii, cap)
    }
}

/// Real Fourier series of a periodic sequence sampled at `i * 2π / n`.
struct Fourier {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    /// Coefficient of `cos(n/2 · θ)` for even `n`, when kept.
    nyquist: Option<(f64, f64)>,
}

impl Fourier {
    fn analyze(samples: &[f64], target_len: usize) -> Self {
        let n = samples.len();
        let band = n.min(target_len);
        let modes = (band - 1) / 2;
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let mut cos = Vec::with_capacity(modes);
        let mut sin = Vec::with_capacity(modes);
        for k in 1..=modes {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &v) in samples.iter().enumerate() {
                let (s, c) = ray_angle((k * j) % n, n).sin_cos();
                a += v * c;
                b += v * s;
            }
            cos.push(2.0 * a / nf);
            sin.push(2.0 * b / nf);
        }
        let nyquist = (n % 2 == 0 && target_len >= n).then(|| {
            let alt: f64 = samples
                .iter()
                .enumerate()
                .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
                .sum();
            (alt / nf, (n / 2) as f64)
        });
        Self {
            mean,
            cos,
            sin,
            nyquist,
        }
    }

    fn eval(&self, theta: f64) -> f64 {
        let mut v = self.mean;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (s, c) = ((k + 1) as f64 * theta).sin_cos();
            v += a * c + b * s;
        }
        if let Some((a, freq)) = self.nyquist {
            v += a * (freq * theta).cos();
        }
        v
    }
}

/// Write Cartesian vertices as `x,y` lines in index order.
pub fn write_contour_csv<W: Write>(mut out: W, points: &[Point]) -> Result<()> {
    for p in points {
        writeln!(out, "{},{}", p.x, p.y)?;
    }
    out.flush()?;
    Ok(())
}

/// Read `x,y` lines. A leading `x,y` header and blank lines are skipped.
pub fn read_contour_csv<R: BufRead>(input: R) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.replace(' ', "").eq_ignore_ascii_case("x,y") {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::format(
                "contour CSV",
                format!("line {}: expected two fields", lineno + 1),
            ));
        };
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| {
                Error::format("contour CSV", format!("line {}: {e}", lineno + 1))
            })
        };
        points.push(Point::new(parse(xs)?, parse(ys)?));
    }
    Ok(points)
}
