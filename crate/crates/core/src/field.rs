//! Dense scalar fields on the pixel grid.
//!
//! Sample `(row, col)` sits at the continuous point `(x, y) = (col, row)`.

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidLandscape(format!(
                "empty field {height}x{width}"
            )));
        }
        if data.len() != height * width {
            return Err(Error::InvalidLandscape(format!(
                "{} values for a {height}x{width} field",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    /// Build from a function of the sample position `(x, y)`.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(c as f64, r as f64));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation. Points outside `[0, W-1] x [0, H-1]` are
    /// clamped to the border first.
    pub fn sample_bilinear(&self, p: Point) -> f64 {
        let (x0, fx) = cell(p.x, self.width);
        let (y0, fy) = cell(p.y, self.height);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let top = self.get(y0, x0) * (1.0 - fx) + self.get(y0, x1) * fx;
        let bottom = self.get(y1, x0) * (1.0 - fx) + self.get(y1, x1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Central differences along x and y, one-sided at the borders.
    pub fn central_gradient(&self) -> (Field, Field) {
        let (h, w) = (self.height, self.width);
        let mut gx = vec![0.0; h * w];
        let mut gy = vec![0.0; h * w];
        for r in 0..h {
            for c in 0..w {
                gx[r * w + c] = diff(w, c, |k| self.get(r, k));
                gy[r * w + c] = diff(h, r, |k| self.get(k, c));
            }
        }
        (
            Field {
                height: h,
                width: w,
                data: gx,
            },
            Field {
                height: h,
                width: w,
                data: gy,
            },
        )
    }

    /// Separable Gaussian blur with clamp-to-edge borders. `sigma <= 0` is a
    /// no-op.
    pub fn gaussian_blur(&self, sigma: f64) -> Field {
        if !(sigma > 0.0) {
            return self.clone();
        }
        let radius = (3.0 * sigma).ceil() as isize;
        let mut kernel: Vec<f64> = (-radius..=radius)
            .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
            .collect();
        let norm: f64 = kernel.iter().sum();
        kernel.iter_mut().for_each(|k| *k /= norm);

        let (h, w) = (self.height as isize, self.width as isize);
        let mut tmp = vec![0.0; self.data.len()];
        for r in 0..h {
            for c in 0..w {
                tmp[(r * w + c) as usize] = kernel
                    .iter()
                    .enumerate()
                    .map(|(k, wt)| {
                        let cc = (c + k as isize - radius).clamp(0, w - 1);
                        wt * self.data[(r * w + cc) as usize]
                    })
                    .sum();
            }
        }
        let mut out = vec![0.0; self.data.len()];
        for r in 0..h {
            for c in 0..w {
                out[(r * w + c) as usize] = kernel
                    .iter()
                    .enumerate()
                    .map(|(k, wt)| {
                        let rr = (r + k as isize - radius).clamp(0, h - 1);
                        wt * tmp[(rr * w + c) as usize]
                    })
                    .sum();
            }
        }
        Field {
            height: self.height,
            width: self.width,
            data: out,
        }
    }
}

/// Lower cell index and fractional offset along one axis of length `n`.
#[inline]
fn cell(v: f64, n: usize) -> (usize, f64) {
    let hi = (n - 1) as f64;
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, hi) };
    if n == 1 {
        return (0, 0.0);
    }
    let i = (v.floor() as usize).min(n - 2);
    (i, v - i as f64)
}

#[inline]
fn diff(n: usize, i: usize, at: impl Fn(usize) -> f64) -> f64 {
    if n == 1 {
        0.0
    } else if i == 0 {
        at(1) - at(0)
    } else if i == n - 1 {
        at(n - 1) - at(n - 2)
    } else {
        0.5 * (at(i + 1) - at(i - 1))
    }
}
