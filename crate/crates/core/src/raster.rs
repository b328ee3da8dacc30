//! Contour rasterization and the segmentation metrics (IoU, area error).
//!
//! Pixel `(row, col)` covers `[col, col+1) x [row, row+1)` and belongs to a
//! polygon when its center `(col + 0.5, row + 0.5)` is inside under the
//! even-odd rule.

use std::io::{Read, Write};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{Point, PolarContour};
use crate::json;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn empty(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            bits: vec![false; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self {
            height,
            width,
            bits,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.bits[row * self.width + col] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    fn check_same_dims(&self, other: &Mask) -> Result<()> {
        if self.height != other.height || self.width != other.width {
            return Err(Error::DimensionMismatch {
                expected_h: self.height,
                expected_w: self.width,
                got_h: other.height,
                got_w: other.width,
            });
        }
        Ok(())
    }
}

/// Mask plus whether the polygon was degenerate (all vertices collinear).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rasterized {
    pub mask: Mask,
    pub degenerate: bool,
}

pub fn rasterize(contour: &PolarContour, height: usize, width: usize) -> Rasterized {
    rasterize_polygon(&contour.to_cartesian(), height, width)
}

/// Scanline even-odd fill sampled at pixel centers.
pub fn rasterize_polygon(vertices: &[Point], height: usize, width: usize) -> Rasterized {
    let mut mask = Mask::empty(height, width);
    if is_degenerate(vertices) {
        return Rasterized {
            mask,
            degenerate: true,
        };
    }
    let n = vertices.len();
    let mut xs = Vec::new();
    for row in 0..height {
        let y = row as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            if let Some(x) = edge_crossing(vertices[i], vertices[(i + 1) % n], y) {
                xs.push(x);
            }
        }
        xs.sort_by(f64::total_cmp);
        // A pixel center px is inside iff an odd number of crossings lie
        // strictly to its right, i.e. px ∈ [xs[2k], xs[2k+1]).
        for span in xs.chunks_exact(2) {
            let (a, b) = (span[0], span[1]);
            let mut col = (a - 0.5).floor().max(0.0) as usize;
            while col < width && (col as f64 + 0.5) < a {
                col += 1;
            }
            while col < width && (col as f64 + 0.5) < b {
                mask.set(row, col, true);
                col += 1;
            }
        }
    }
    Rasterized {
        mask,
        degenerate: false,
    }
}

/// x where the edge `a -> b` crosses the horizontal line at `y`, using the
/// half-open rule `(a.y > y) != (b.y > y)` so shared vertices count once.
#[inline]
pub fn edge_crossing(a: Point, b: Point, y: f64) -> Option<f64> {
    if (a.y > y) != (b.y > y) {
        Some(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y))
    } else {
        None
    }
}

fn is_degenerate(vertices: &[Point]) -> bool {
    if vertices.len() < 3 {
        return true;
    }
    let o = vertices[0];
    let Some(far) = vertices
        .iter()
        .copied()
        .max_by(|a, b| a.dist(o).total_cmp(&b.dist(o)))
    else {
        return true;
    };
    let (dx, dy) = (far.x - o.x, far.y - o.y);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return true;
    }
    vertices
        .iter()
        .all(|p| ((p.x - o.x) * dy - (p.y - o.y) * dx).abs() <= 1e-12 * len * len)
}

/// `|a ∧ b| / |a ∨ b|`, or 1.0 when both are empty.
pub fn iou(a: &Mask, b: &Mask) -> Result<f64> {
    a.check_same_dims(b)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

pub fn area_m2(mask: &Mask, resolution_m: f64) -> f64 {
    mask.count() as f64 * resolution_m * resolution_m
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub id: String,
    pub iou: f64,
    /// Both masks empty; IoU was set to 1.0 by convention.
    pub both_empty: bool,
    pub pred_area_m2: Option<f64>,
    pub gt_area_m2: Option<f64>,
    pub area_error_m2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub samples: Vec<SampleResult>,
    pub mean_iou: f64,
    /// Root mean square of the per-sample area errors; present when a
    /// ground resolution was given.
    pub rmse_m2: Option<f64>,
    pub resolution_m: Option<f64>,
}

/// One predicted/ground-truth pair.
pub struct EvalSample<'a> {
    pub id: &'a str,
    pub pred: &'a Mask,
    pub gt: &'a Mask,
}

pub fn evaluate_batch(samples: &[EvalSample<'_>], resolution_m: Option<f64>) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples to evaluate".into()));
    }
    if let Some(res) = resolution_m {
        if !(res > 0.0 && res.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "resolution {res} m/pixel must be positive"
            )));
        }
    }
    let results = samples
        .iter()
        .map(|s| {
            let iou = iou(s.pred, s.gt).map_err(|e| Error::Sample {
                id: s.id.to_owned(),
                reason: e.to_string(),
            })?;
            let areas = resolution_m.map(|res| (area_m2(s.pred, res), area_m2(s.gt, res)));
            Ok(SampleResult {
                id: s.id.to_owned(),
                iou,
                both_empty: s.pred.is_empty() && s.gt.is_empty(),
                pred_area_m2: areas.map(|a| a.0),
                gt_area_m2: areas.map(|a| a.1),
                area_error_m2: areas.map(|(p, g)| (p - g).abs()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(results, resolution_m))
}

/// Aggregate per-sample results into mIoU and area RMSE.
pub fn aggregate(samples: Vec<SampleResult>, resolution_m: Option<f64>) -> EvalReport {
    let n = samples.len() as f64;
    let mean_iou = samples.iter().map(|s| s.iou).sum::<f64>() / n;
    let rmse_m2 = resolution_m.map(|_| {
        let sq: f64 = samples
            .iter()
            .map(|s| s.area_error_m2.unwrap_or(0.0).powi(2))
            .sum();
        (sq / n).sqrt()
    });
    EvalReport {
        samples,
        mean_iou,
        rmse_m2,
        resolution_m,
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let opt = |v: Option<f64>| v.map(json::float).unwrap_or(Value::Null);
        let samples = self
            .samples
            .iter()
            .map(|s| {
                json::object([
                    ("area_error_m2", opt(s.area_error_m2)),
                    ("both_empty", s.both_empty.into()),
                    ("gt_area_m2", opt(s.gt_area_m2)),
                    ("id", s.id.clone().into()),
                    ("iou", json::float(s.iou)),
                    ("pred_area_m2", opt(s.pred_area_m2)),
                ])
            })
            .collect();
        let v = json::object([
            ("mean_iou", json::float(self.mean_iou)),
            ("resolution_m", opt(self.resolution_m)),
            ("rmse_m2", opt(self.rmse_m2)),
            ("samples", Value::Array(samples)),
        ]);
        json::to_string(&v)
    }

    /// Aligned plain-text table, one row per sample and a summary row.
    pub fn to_table(&self) -> String {
        let id_w = self
            .samples
            .iter()
            .map(|s| s.id.len())
            .chain(["sample".len(), "mean".len()])
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        let with_area = self.resolution_m.is_some();
        if with_area {
            out.push_str(&format!(
                "{:<id_w$} | {:>7} | {:>12} | {:>12} | {:>12}\n",
                "sample", "IoU", "pred m^2", "gt m^2", "err m^2"
            ));
        } else {
            out.push_str(&format!("{:<id_w$} | {:>7}\n", "sample", "IoU"));
        }
        let rule_len = if with_area { id_w + 58 } else { id_w + 10 };
        out.push_str(&"-".repeat(rule_len));
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{:<id_w$} | {:>7.3}", s.id, s.iou));
            if let (Some(p), Some(g), Some(e)) = (s.pred_area_m2, s.gt_area_m2, s.area_error_m2) {
                out.push_str(&format!(" | {p:>12.2} | {g:>12.2} | {e:>12.2}"));
            }
            out.push('\n');
        }
        out.push_str(&"-".repeat(rule_len));
        out.push('\n');
        out.push_str(&format!("{:<id_w$} | {:>7.3}", "mean", self.mean_iou));
        if let Some(rmse) = self.rmse_m2 {
            out.push_str(&format!(" | {:>12} | {:>12} | {:>12.2}", "", "RMSE", rmse));
        }
        out.push('\n');
        out
    }
}

/// Binary PGM (P5, maxval 255): 0 for background, 255 for building.
pub fn write_pgm<W: Write>(mut out: W, mask: &Mask) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", mask.width, mask.height)?;
    let bytes: Vec<u8> = mask.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

/// Read a binary PGM; pixels at or above half of maxval are set.
pub fn read_pgm<R: Read>(mut input: R) -> Result<Mask> {
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format("PGM", "truncated header"));
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::format("PGM", "only binary P5 is supported"));
    }
    let mut num = |what: &str| -> Result<usize> {
        token()?
            .parse()
            .map_err(|_| Error::format("PGM", format!("bad {what}")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::format("PGM", format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    let body = pos + 1;
    let expected = width * height;
    if data.len() < body || data.len() - body != expected {
        return Err(Error::format(
            "PGM",
            format!("expected {expected} raster bytes"),
        ));
    }
    let threshold = maxval.div_ceil(2);
    let bits = data[body..]
        .iter()
        .map(|&v| v as usize >= threshold)
        .collect();
    Ok(Mask {
        height,
        width,
        bits,
    })
}
