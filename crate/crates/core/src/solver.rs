//! Semi-implicit contour evolution.
//!
//! Each iteration samples β, κ and ∇D at the current vertices and holds them
//! fixed ("frozen coefficients"). Under that freezing the energy is quadratic
//! in the radii: the curvature term becomes `½ ρᵀAρ` with `A` a symmetric
//! cyclic pentadiagonal matrix, and the data and balloon terms become linear.
//! The update is implicit in `A` and explicit in the rest:
//!
//! ```text
//! (A + γI) δ = -(Aρ + g_ext),   ρ' = clamp(ρ + δ, [ρ_floor, ρmax_i])
//! ```
//!
//! which is the same fixed point as `(A + γI) ρ' = γρ - g_ext` but leaves the
//! radii bit-identical when the gradient vanishes.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{ray_directions, Point, PolarContour};
use crate::json;
use crate::landscape::{curvature_energy, EnergyBreakdown, EnergyLandscape};

/// How many times backtracking may double the damping before giving up.
pub const MAX_HALVINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Damping γ of the implicit step; larger is a smaller step.
    pub step_gamma: f64,
    /// Stop once the largest radius change of an iteration drops below this.
    pub tol_rho: f64,
    pub rho_floor: f64,
    pub backtracking: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 400,
            step_gamma: 1.0,
            tol_rho: 1e-3,
            rho_floor: 0.5,
            backtracking: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_gamma", self.step_gamma),
            ("tol_rho", self.tol_rho),
            ("rho_floor", self.rho_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    MaxIters,
    NumericalFailure,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Converged => "converged",
            SolverStatus::MaxIters => "max_iters",
            SolverStatus::NumericalFailure => "numerical_failure",
        }
    }
}

/// Diagnostics of one accepted iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Energy of the accepted contour.
    pub energy: EnergyBreakdown,
    pub max_delta_rho: f64,
    pub mean_rho: f64,
    pub halvings: u32,
    /// Radii that hit the floor or the cap after the solve.
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub initial: EnergyBreakdown,
    pub records: Vec<IterationRecord>,
    pub status: SolverStatus,
}

impl SolverTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Totals of the initial contour followed by every accepted iteration.
    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.initial.total).chain(self.records.iter().map(|r| r.energy.total))
    }

    /// One JSON object holding an array per diagnostic, keys sorted.
    pub fn to_json(&self) -> String {
        let col = |f: fn(&IterationRecord) -> f64| json::floats(self.records.iter().map(f));
        let ints = |f: fn(&IterationRecord) -> u64| {
            Value::Array(self.records.iter().map(|r| f(r).into()).collect())
        };
        let v = json::object([
            ("clamped", ints(|r| r.clamped as u64)),
            ("energy_balloon", col(|r| r.energy.balloon)),
            ("energy_curve", col(|r| r.energy.curve)),
            ("energy_data", col(|r| r.energy.data)),
            ("energy_total", col(|r| r.energy.total)),
            ("halvings", ints(|r| r.halvings as u64)),
            (
                "initial",
                json::object([
                    ("energy_balloon", json::float(self.initial.balloon)),
                    ("energy_curve", json::float(self.initial.curve)),
                    ("energy_data", json::float(self.initial.data)),
                    ("energy_total", json::float(self.initial.total)),
                ]),
            ),
            ("iterations", (self.records.len() as u64).into()),
            ("max_delta_rho", col(|r| r.max_delta_rho)),
            ("mean_rho", col(|r| r.mean_rho)),
            ("status", self.status.as_str().into()),
        ]);
        json::to_string(&v)
    }
}

/// β, κ and ∇D sampled at an anchor contour and held fixed.
#[derive(Debug, Clone)]
pub struct FrozenCoefficients {
    center: Point,
    directions: Vec<Point>,
    anchor_radii: Vec<f64>,
    anchor_d: Vec<f64>,
    grad_d: Vec<Point>,
    beta: Vec<f64>,
    kappa: Vec<f64>,
    caps: Vec<f64>,
}

impl FrozenCoefficients {
    pub fn sample(landscape: &EnergyLandscape, contour: &PolarContour) -> Self {
        let pts = contour.to_cartesian();
        Self {
            center: contour.center(),
            directions: ray_directions(contour.len()),
            anchor_radii: contour.radii().to_vec(),
            anchor_d: pts.iter().map(|&p| landscape.d_at(p)).collect(),
            grad_d: pts.iter().map(|&p| landscape.grad_d_at(p)).collect(),
            beta: pts.iter().map(|&p| landscape.beta_at(p)).collect(),
            kappa: pts.iter().map(|&p| landscape.kappa_at(p)).collect(),
            caps: (0..contour.len()).map(|i| contour.cap().get(i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Hessian of the frozen curvature energy in ρ.
    ///
    /// With `s_j = Σ_k w_jk ρ_k u_k` and weights `(1, -2, 1)` on
    /// `(j-1, j, j+1)`, the energy `Σ_j β_j |s_j|²` expands to
    /// `Σ_{k,l} ρ_k ρ_l Σ_j β_j w_jk w_jl (u_k·u_l)`.
    pub fn curvature_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut a = DMatrix::zeros(n, n);
        let stencil = [(n - 1, 1.0), (0, -2.0), (1, 1.0)];
        for j in 0..n {
            let b = self.beta[j];
            if b == 0.0 {
                continue;
            }
            for &(dk, wk) in &stencil {
                let k = (j + dk) % n;
                let uk = self.directions[k];
                for &(dl, wl) in &stencil {
                    let l = (j + dl) % n;
                    let ul = self.directions[l];
                    a[(k, l)] += 2.0 * b * wk * wl * (uk.x * ul.x + uk.y * ul.y);
                }
            }
        }
        a
    }

    /// Data plus balloon gradient; independent of ρ under freezing.
    pub fn external_gradient(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let u = self.directions[i];
                let g = self.grad_d[i];
                (g.x * u.x + g.y * u.y) - self.kappa[i] / self.caps[i]
            })
            .collect()
    }

    /// Frozen energy evaluated through Cartesian vertices: the data term is
    /// the first-order expansion of `D` about the anchor vertices.
    pub fn energy(&self, radii: &[f64]) -> f64 {
        let pts: Vec<Point> = radii
            .iter()
            .zip(&self.directions)
            .map(|(&r, u)| Point::new(self.center.x + r * u.x, self.center.y + r * u.y))
            .collect();
        let data: f64 = (0..self.len())
            .map(|i| {
                let shift = radii[i] - self.anchor_radii[i];
                let g = self.grad_d[i];
                let u = self.directions[i];
                self.anchor_d[i] + g.x * (shift * u.x) + g.y * (shift * u.y)
            })
            .sum();
        let balloon: f64 = (0..self.len())
            .map(|i| self.kappa[i] * (1.0 - radii[i] / self.caps[i]))
            .sum();
        data + curvature_energy(&pts, &self.beta) + balloon
    }
}

/// `∂E/∂ρ_i` under frozen β, κ and ∇D.
pub fn gradient_rho(landscape: &EnergyLandscape, contour: &PolarContour) -> Vec<f64> {
    let frozen = FrozenCoefficients::sample(landscape, contour);
    let a = frozen.curvature_matrix();
    let rho = DVector::from_column_slice(contour.radii());
    let curve = &a * &rho;
    frozen
        .external_gradient()
        .into_iter()
        .zip(curve.iter())
        .map(|(e, c)| e + c)
        .collect()
}

pub fn curvature_matrix(landscape: &EnergyLandscape, contour: &PolarContour) -> DMatrix<f64> {
    FrozenCoefficients::sample(landscape, contour).curvature_matrix()
}

struct Candidate {
    radii: Vec<f64>,
    contour: PolarContour,
    energy: EnergyBreakdown,
    clamped: usize,
}

/// Evolve `init` until the largest radius change falls below `tol_rho` or
/// `max_iters` iterations have run.
pub fn evolve(
    landscape: &EnergyLandscape,
    init: &PolarContour,
    config: &SolverConfig,
) -> Result<(PolarContour, SolverTrace)> {
    config.validate()?;
    let n = init.len();
    let caps: Vec<f64> = (0..n).map(|i| init.cap().get(i)).collect();
    if let Some(c) = caps.iter().find(|&&c| c < config.rho_floor) {
        return Err(Error::InvalidArgument(format!(
            "radius cap {c} is below rho_floor {}",
            config.rho_floor
        )));
    }

    let mut current = init.clone();
    let mut energy = landscape.energy_total(&current);
    let mut trace = SolverTrace {
        initial: energy,
        records: Vec::new(),
        status: SolverStatus::MaxIters,
    };
    if !energy.total.is_finite() {
        return fail(trace, 0, "initial energy is not finite");
    }

    let attempts = if config.backtracking { MAX_HALVINGS + 1 } else { 1 };
    for iteration in 1..=config.max_iters {
        let frozen = FrozenCoefficients::sample(landscape, &current);
        let a = frozen.curvature_matrix();
        let rho = DVector::from_column_slice(current.radii());
        let g_ext = DVector::from_vec(frozen.external_gradient());
        let neg_grad = -(&a * &rho + g_ext);

        let mut gamma = config.step_gamma;
        let mut best: Option<(Candidate, u32)> = None;
        let mut accepted = None;
        for halving in 0..attempts {
            let mut system = a.clone();
            for i in 0..n {
                system[(i, i)] += gamma;
            }
            let Some(step) = system.lu().solve(&neg_grad) else {
                return fail(trace, iteration, "singular system");
            };
            let mut clamped = 0;
            let radii: Vec<f64> = (0..n)
                .map(|i| {
                    let r = rho[i] + step[i];
                    let c = r.clamp(config.rho_floor, caps[i]);
                    if c != r {
                        clamped += 1;
                    }
                    c
                })
                .collect();
            if radii.iter().any(|r| !r.is_finite()) {
                return fail(trace, iteration, "non-finite radius");
            }
            let contour = current.with_radii(radii.clone())?;
            let e = landscape.energy_total(&contour);
            if !e.total.is_finite() {
                return fail(trace, iteration, "non-finite energy");
            }
            let cand = Candidate {
                radii,
                contour,
                energy: e,
                clamped,
            };
            if !config.backtracking || e.total <= energy.total {
                accepted = Some((cand, halving));
                break;
            }
            if best
                .as_ref()
                .is_none_or(|(b, _)| cand.energy.total < b.energy.total)
            {
                best = Some((cand, halving));
            }
            gamma *= 2.0;
        }

        // Every damped candidate raised the energy: keep whichever is lowest,
        // counting the current contour as a candidate.
        let (cand, halvings) = match accepted {
            Some(a) => a,
            None => {
                let (b, _) = best.expect("at least one attempt");
                if b.energy.total <= energy.total {
                    (b, MAX_HALVINGS)
                } else {
                    (
                        Candidate {
                            radii: current.radii().to_vec(),
                            contour: current.clone(),
                            energy,
                            clamped: 0,
                        },
                        MAX_HALVINGS,
                    )
                }
            }
        };

        let max_delta_rho = cand
            .radii
            .iter()
            .zip(rho.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        trace.records.push(IterationRecord {
            energy: cand.energy,
            max_delta_rho,
            mean_rho: cand.radii.iter().sum::<f64>() / n as f64,
            halvings,
            clamped: cand.clamped,
        });
        current = cand.contour;
        energy = cand.energy;
        if max_delta_rho < config.tol_rho {
            trace.status = SolverStatus::Converged;
            break;
        }
    }
    Ok((current, trace))
}

fn fail<T>(mut trace: SolverTrace, iteration: usize, reason: &str) -> Result<T> {
    trace.status = SolverStatus::NumericalFailure;
    Err(Error::NumericalFailure {
        iteration,
        reason: reason.to_owned(),
        trace: Box::new(trace),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use std::f64::consts::TAU;

    fn center() -> Point {
        Point::new(32.0, 32.0)
    }

    #[test]
    fn zero_maps_have_zero_gradient() {
        let land = EnergyLandscape::uniform(64, 64, 3.0, 0.0, 0.0).unwrap();
        let c = PolarContour::circle(center(), 10.0, 60, 31.0).unwrap();
        assert!(gradient_rho(&land, &c).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn balloon_gradient() {
        let land = EnergyLandscape::uniform(64, 64, 0.0, 0.0, 1.0).unwrap();
        let c = PolarContour::circle(center(), 10.0, 60, 31.0).unwrap();
        for g in gradient_rho(&land, &c) {
            assert!((g + 1.0 / 31.0).abs() < 1e-15);
        }
    }

    #[test]
    fn curvature_matrix_closed_form_on_circle() {
        let land = EnergyLandscape::uniform(64, 64, 0.0, 1.0, 0.0).unwrap();
        let c = PolarContour::circle(center(), 9.0, 60, 31.0).unwrap();
        let a = curvature_matrix(&land, &c);
        let rho = DVector::from_column_slice(c.radii());
        let q = 0.5 * rho.dot(&(&a * &rho));
        let expected = 60.0 * 81.0 * 4.0 * (1.0 - (TAU / 60.0).cos()).powi(2);
        assert!((q - expected).abs() < 1e-9, "{q} vs {expected}");
        assert_eq!(a, a.transpose());
    }

    #[test]
    fn curvature_matrix_is_banded() {
        let land = EnergyLandscape::uniform(64, 64, 0.0, 1.0, 0.0).unwrap();
        let c = PolarContour::circle(center(), 9.0, 12, 31.0).unwrap();
        let a = curvature_matrix(&land, &c);
        for i in 0..12 {
            for j in 0..12 {
                let d = (i as isize - j as isize).rem_euclid(12).min((j as isize - i as isize).rem_euclid(12));
                if d > 2 {
                    assert_eq!(a[(i, j)], 0.0);
                } else {
                    assert_ne!(a[(i, j)], 0.0);
                }
            }
        }
        let flat = EnergyLandscape::uniform(64, 64, 0.0, 0.0, 0.0).unwrap();
        assert!(curvature_matrix(&flat, &c).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_maps_are_a_fixed_point() {
        let land = EnergyLandscape::uniform(64, 64, 0.0, 0.0, 0.0).unwrap();
        let init = PolarContour::circle(center(), 12.5, 60, 31.0).unwrap();
        let cfg = SolverConfig {
            step_gamma: 0.3,
            ..SolverConfig::default()
        };
        let (out, trace) = evolve(&land, &init, &cfg).unwrap();
        assert_eq!(out, init);
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.status, SolverStatus::Converged);
    }

    #[test]
    fn balloon_inflates_monotonically() {
        let land = EnergyLandscape::uniform(64, 64, 0.0, 0.0, 1.0).unwrap();
        let init = PolarContour::circle(center(), 8.0, 60, 31.0).unwrap();
        let cfg = SolverConfig {
            step_gamma: 0.05,
            ..SolverConfig::default()
        };
        let (out, trace) = evolve(&land, &init, &cfg).unwrap();
        assert_eq!(trace.status, SolverStatus::Converged);
        assert!(out.radii().iter().all(|&r| (r - 31.0).abs() < cfg.tol_rho));
        assert!(trace.energies().collect::<Vec<_>>().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn trace_json_has_sorted_arrays() {
        let land = EnergyLandscape::uniform(16, 16, 0.0, 0.0, 1.0).unwrap();
        let init = PolarContour::circle(Point::new(7.5, 7.5), 3.0, 8, 7.5).unwrap();
        let (_, trace) = evolve(&land, &init, &SolverConfig::default()).unwrap();
        let v: Value = serde_json::from_str(&trace.to_json()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(v["energy_total"].as_array().unwrap().len(), trace.len());
        assert_eq!(v["iterations"], trace.len() as u64);
    }

    #[test]
    fn rejects_bad_config() {
        let land = EnergyLandscape::uniform(16, 16, 0.0, 0.0, 0.0).unwrap();
        let init = PolarContour::circle(Point::new(7.5, 7.5), 3.0, 8, 7.5).unwrap();
        for cfg in [
            SolverConfig { max_iters: 0, ..Default::default() },
            SolverConfig { step_gamma: 0.0, ..Default::default() },
            SolverConfig { tol_rho: -1.0, ..Default::default() },
            SolverConfig { rho_floor: 10.0, ..Default::default() },
        ] {
            assert!(evolve(&land, &init, &cfg).is_err());
        }
    }

    #[test]
    fn data_gradient_follows_linear_field() {
        // D = 2x + y + 100: ∂D/∂ρ_i = 2 cos θ_i + sin θ_i everywhere in the interior.
        let d = Field::from_fn(64, 64, |x, y| 2.0 * x + y + 100.0);
        let land = EnergyLandscape::new(
            d,
            Field::constant(64, 64, 0.0),
            Field::constant(64, 64, 0.0),
        )
        .unwrap();
        let c = PolarContour::circle(center(), 10.0, 24, 31.0).unwrap();
        for (i, g) in gradient_rho(&land, &c).into_iter().enumerate() {
            let t = TAU * i as f64 / 24.0;
            assert!((g - (2.0 * t.cos() + t.sin())).abs() < 1e-12);
        }
    }
}
