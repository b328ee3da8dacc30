//! The three energy maps and the energy functional evaluated on a contour.
//!
//! * data: `Σ D(c_i)`
//! * curvature: `Σ β(c_i) |c_{i+1} - 2 c_i + c_{i-1}|²` (cyclic)
//! * balloon: `Σ κ(c_i) (1 - ρ_i / ρmax_i)`
//!
//! Maps are sampled bilinearly at the sub-pixel vertex positions, clamped to
//! the grid border.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{Point, PolarContour};

pub const EMAP_MAGIC: &[u8; 4] = b"EMAP";
pub const EMAP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLandscape {
    data: Field,
    beta: Field,
    kappa: Field,
    grad_x: Field,
    grad_y: Field,
}

/// Per-term energies. `total` is `data + curve + balloon` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnergyBreakdown {
    pub data: f64,
    pub curve: f64,
    pub balloon: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(data: f64, curve: f64, balloon: f64) -> Self {
        Self {
            data,
            curve,
            balloon,
            total: data + curve + balloon,
        }
    }
}

impl EnergyLandscape {
    /// Validates shapes and non-negativity, then precomputes `∇D`.
    pub fn new(data: Field, beta: Field, kappa: Field) -> Result<Self> {
        let (h, w) = (data.height(), data.width());
        for (name, f) in [("D", &data), ("beta", &beta), ("kappa", &kappa)] {
            if f.height() != h || f.width() != w {
                return Err(Error::DimensionMismatch {
                    expected_h: h,
                    expected_w: w,
                    got_h: f.height(),
                    got_w: f.width(),
                });
            }
            if let Some(v) = f.data().iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return Err(Error::InvalidLandscape(format!(
                    "{name} contains {v}; maps must be finite and non-negative"
                )));
            }
        }
        let (grad_x, grad_y) = data.central_gradient();
        Ok(Self {
            data,
            beta,
            kappa,
            grad_x,
            grad_y,
        })
    }

    /// All three maps constant.
    pub fn uniform(height: usize, width: usize, d: f64, beta: f64, kappa: f64) -> Result<Self> {
        Self::new(
            Field::constant(height, width, d),
            Field::constant(height, width, beta),
            Field::constant(height, width, kappa),
        )
    }

    pub fn height(&self) -> usize {
        self.data.height()
    }

    pub fn width(&self) -> usize {
        self.data.width()
    }

    pub fn data_map(&self) -> &Field {
        &self.data
    }

    pub fn beta_map(&self) -> &Field {
        &self.beta
    }

    pub fn kappa_map(&self) -> &Field {
        &self.kappa
    }

    pub fn grad_x(&self) -> &Field {
        &self.grad_x
    }

    pub fn grad_y(&self) -> &Field {
        &self.grad_y
    }

    pub fn d_at(&self, p: Point) -> f64 {
        self.data.sample_bilinear(p)
    }

    pub fn beta_at(&self, p: Point) -> f64 {
        self.beta.sample_bilinear(p)
    }

    pub fn kappa_at(&self, p: Point) -> f64 {
        self.kappa.sample_bilinear(p)
    }

    /// Interpolated central-difference gradient of `D`.
    pub fn grad_d_at(&self, p: Point) -> Point {
        Point::new(self.grad_x.sample_bilinear(p), self.grad_y.sample_bilinear(p))
    }

    pub fn energy_data(&self, contour: &PolarContour) -> f64 {
        contour.to_cartesian().into_iter().map(|p| self.d_at(p)).sum()
    }

    pub fn energy_curve(&self, contour: &PolarContour) -> f64 {
        let pts = contour.to_cartesian();
        let weights: Vec<f64> = pts.iter().map(|&p| self.beta_at(p)).collect();
        curvature_energy(&pts, &weights)
    }

    pub fn energy_balloon(&self, contour: &PolarContour) -> f64 {
        contour
            .radii()
            .iter()
            .enumerate()
            .map(|(i, &r)| self.kappa_at(contour.vertex(i)) * (1.0 - r / contour.cap().get(i)))
            .sum()
    }

    pub fn energy_total(&self, contour: &PolarContour) -> EnergyBreakdown {
        EnergyBreakdown::new(
            self.energy_data(contour),
            self.energy_curve(contour),
            self.energy_balloon(contour),
        )
    }
}

/// `Σ w_i |p_{i+1} - 2 p_i + p_{i-1}|²` over a closed polygon.
pub fn curvature_energy(points: &[Point], weights: &[f64]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let prev = points[(i + n - 1) % n];
            let next = points[(i + 1) % n];
            let dx = next.x - 2.0 * points[i].x + prev.x;
            let dy = next.y - 2.0 * points[i].y + prev.y;
            weights[i] * (dx * dx + dy * dy)
        })
        .sum()
}

/// Write the landscape in EMAP layout. Planes are stored as `f32`; gradients
/// are not stored.
pub fn write_emap<W: Write>(mut out: W, landscape: &EnergyLandscape) -> Result<()> {
    let (h, w) = (landscape.height(), landscape.width());
    let mut buf = Vec::with_capacity(16 + 12 * h * w);
    buf.extend_from_slice(EMAP_MAGIC);
    buf.extend_from_slice(&EMAP_VERSION.to_le_bytes());
    buf.extend_from_slice(&(h as u32).to_le_bytes());
    buf.extend_from_slice(&(w as u32).to_le_bytes());
    for plane in [&landscape.data, &landscape.beta, &landscape.kappa] {
        for &v in plane.data() {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn read_emap<R: Read>(mut input: R) -> Result<EnergyLandscape> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::format("EMAP", "truncated header"));
    }
    if &bytes[..4] != EMAP_MAGIC {
        return Err(Error::format("EMAP", "bad magic"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let version = word(4);
    if version != EMAP_VERSION {
        return Err(Error::format("EMAP", format!("unsupported version {version}")));
    }
    let (h, w) = (word(8) as usize, word(12) as usize);
    let plane = h
        .checked_mul(w)
        .ok_or_else(|| Error::format("EMAP", "dimensions overflow"))?;
    let expected = 16 + 12 * plane;
    if bytes.len() != expected {
        return Err(Error::format(
            "EMAP",
            format!("{} bytes, expected {expected} for {h}x{w}", bytes.len()),
        ));
    }
    let read_plane = |k: usize| {
        let start = 16 + 4 * plane * k;
        let values = bytes[start..start + 4 * plane]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
            .collect();
        Field::new(h, w, values)
    };
    EnergyLandscape::new(read_plane(0)?, read_plane(1)?, read_plane(2)?)
}
