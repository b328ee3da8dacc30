//! Active-rays contour extraction.
//!
//! A star-shaped contour is described by radii along fixed rays from a
//! reference point ([`geometry`]). It is evolved over three non-negative maps
//! (data `D`, curvature weight `β`, balloon weight `κ`, see [`landscape`]) by
//! a semi-implicit scheme ([`solver`]). [`raster`] turns contours into masks
//! and scores them; [`oracle`] synthesizes landscapes from known shapes.

pub mod error;
pub mod field;
pub mod geometry;
mod json;
pub mod landscape;
pub mod oracle;
pub mod raster;
pub mod solver;

pub use error::{Error, Result};
pub use field::Field;
pub use geometry::{CapMode, Point, PolarContour, RayCap};
pub use landscape::{EnergyBreakdown, EnergyLandscape};
pub use oracle::{gt_mask, synth_landscape, Shape, ShapeSpec, SynthSpec};
pub use raster::{area_m2, evaluate_batch, iou, rasterize, EvalReport, Mask};
pub use solver::{evolve, gradient_rho, SolverConfig, SolverStatus, SolverTrace};
