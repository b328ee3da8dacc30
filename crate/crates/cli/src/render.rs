//! SVG overlay of contours on a raster background.
//!
//! Background pixel `(row, col)` is drawn centered on `(col, row)`, the point
//! where the landscape samples it, so contour coordinates overlay directly.
//! Ground truth is stroked blue and predictions yellow.

use std::fmt::Write as _;
use std::io::Cursor;

use activerays::{EnergyLandscape, Point};
use base64::Engine;
use image::{DynamicImage, GrayImage, ImageFormat};

use crate::error::{CliError, Result};

pub const GT_STROKE: &str = "#1f4fff";
pub const PRED_STROKE: &str = "#ffd700";

pub enum Background<'a> {
    Landscape(&'a EnergyLandscape),
    Image(DynamicImage),
}

pub struct Svg {
    height: usize,
    width: usize,
    body: String,
}

impl Svg {
    pub fn new(background: Background<'_>) -> Result<Self> {
        let img = match background {
            Background::Landscape(land) => DynamicImage::ImageLuma8(d_map_gray(land)),
            Background::Image(img) => img,
        };
        let (width, height) = (img.width() as usize, img.height() as usize);
        let mut png = Vec::new();
        img.write_to(&mut Cursor::new(&mut png), ImageFormat::Png)
            .map_err(|e| CliError::Usage(format!("cannot encode background: {e}")))?;
        let data = base64::engine::general_purpose::STANDARD.encode(png);

        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="-0.5 -0.5 {width} {height}">"#
        );
        let _ = writeln!(
            body,
            r#"<image x="-0.5" y="-0.5" width="{width}" height="{height}" style="image-rendering:pixelated" href="data:image/png;base64,{data}"/>"#
        );
        Ok(Self {
            height,
            width,
            body,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Whether `p` falls on the drawn background.
    pub fn contains(&self, p: Point) -> bool {
        let inside = |v: f64, n: usize| v >= -0.5 && v <= n as f64 - 0.5;
        inside(p.x, self.width) && inside(p.y, self.height)
    }

    pub fn ground_truth(&mut self, pts: &[Point]) {
        self.path(pts, "gt", GT_STROKE);
    }

    pub fn prediction(&mut self, pts: &[Point]) {
        self.path(pts, "pred", PRED_STROKE);
    }

    fn path(&mut self, pts: &[Point], class: &str, stroke: &str) {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, p.x, p.y);
        }
        d.push('Z');
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="{d}" fill="none" stroke="{stroke}" stroke-width="0.5"/>"#
        );
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// D rescaled to 0..=255; low values (boundaries) are dark.
fn d_map_gray(land: &EnergyLandscape) -> GrayImage {
    let d = land.data_map();
    let (lo, hi) = (d.min(), d.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    GrayImage::from_fn(d.width() as u32, d.height() as u32, |x, y| {
        let v = (d.get(y as usize, x as usize) - lo) / span;
        image::Luma([(v * 255.0).round().clamp(0.0, 255.0) as u8])
    })
}
