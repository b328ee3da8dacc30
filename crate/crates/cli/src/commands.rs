use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use activerays::geometry::{read_contour_csv, write_contour_csv};
use activerays::landscape::{read_emap, write_emap};
use activerays::raster::{read_pgm, write_pgm, EvalSample};
use activerays::{
    evaluate_batch, evolve as run_solver, gt_mask, EnergyLandscape, Error as CoreError, Mask,
    Point, PolarContour, RayCap, SolverConfig, SynthSpec,
};

use crate::error::{CliError, Result};
use crate::render::{Background, Svg};
use crate::{EvalArgs, EvolveArgs, RenderArgs, SynthArgs};

fn require_input(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Read {
            path: path.to_owned(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        })
    }
}

fn require_output(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    match parent {
        Some(dir) if !dir.is_dir() => Err(CliError::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

/// Parse-level failures of an input file map to the input exit code.
fn parsed<T>(path: &Path, r: activerays::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        CoreError::Format { .. } | CoreError::Io(_) | CoreError::InvalidLandscape(_) => {
            CliError::Parse {
                path: path.to_owned(),
                reason: e.to_string(),
            }
        }
        other => other.into(),
    })
}

fn load_landscape(path: &Path) -> Result<EnergyLandscape> {
    let bytes = read(path)?;
    parsed(path, read_emap(bytes.as_slice()))
}

fn load_contour(path: &Path) -> Result<Vec<Point>> {
    let bytes = read(path)?;
    parsed(path, read_contour_csv(bytes.as_slice()))
}

fn load_mask(path: &Path) -> Result<Mask> {
    let bytes = read(path)?;
    parsed(path, read_pgm(bytes.as_slice()))
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    require_input(&args.spec)?;
    require_output(&args.out)?;
    require_output(&args.mask)?;
    let text = read(&args.spec)?;
    let spec: SynthSpec = serde_json::from_slice(&text).map_err(|e| CliError::Parse {
        path: args.spec.clone(),
        reason: e.to_string(),
    })?;
    let shape = spec.shape_spec()?;
    let landscape = spec.landscape()?;

    let mut emap = Vec::new();
    write_emap(&mut emap, &landscape)?;
    let mut pgm = Vec::new();
    write_pgm(&mut pgm, &gt_mask(&shape))?;
    write(&args.out, &emap)?;
    write(&args.mask, &pgm)
}

pub fn evolve(args: &EvolveArgs) -> Result<()> {
    require_input(&args.landscape)?;
    require_output(&args.out)?;
    if let Some(t) = &args.trace {
        require_output(t)?;
    }
    let config = SolverConfig {
        max_iters: args.max_iters,
        step_gamma: args.gamma,
        tol_rho: args.tol,
        rho_floor: args.rho_floor,
        backtracking: !args.no_backtracking,
    };
    config.validate()?;

    let landscape = load_landscape(&args.landscape)?;
    let (h, w) = (landscape.height(), landscape.width());
    let center = args.init_center.unwrap_or(Point::new(
        (w as f64 - 1.0) / 2.0,
        (h as f64 - 1.0) / 2.0,
    ));
    let cap = RayCap::for_image(args.cap_mode.into(), center, args.vertices, h, w)?;
    let radius = match args.init_radius {
        Some(r) => r,
        None => {
            let f = args.init_radius_frac;
            if !(f > 0.0 && f <= 1.0) {
                return Err(CliError::Usage(format!(
                    "--init-radius-frac {f} must be in (0, 1]"
                )));
            }
            f * cap.min()
        }
    };
    let init = PolarContour::circle(center, radius, args.vertices, cap)?;

    match run_solver(&landscape, &init, &config) {
        Ok((contour, trace)) => {
            let mut csv = Vec::new();
            write_contour_csv(&mut csv, &contour.to_cartesian())?;
            write(&args.out, &csv)?;
            if let Some(path) = &args.trace {
                write(path, trace.to_json().as_bytes())?;
            }
            eprintln!(
                "{} after {} iterations, energy {:.6}",
                trace.status.as_str(),
                trace.len(),
                trace.energies().last().unwrap_or(f64::NAN)
            );
            Ok(())
        }
        Err(e) => {
            if let (CoreError::NumericalFailure { trace, .. }, Some(path)) = (&e, &args.trace) {
                write(path, trace.to_json().as_bytes())?;
            }
            Err(e.into())
        }
    }
}

/// Collect `<id>_pred.pgm` / `<id>_gt.pgm` pairs, ordered by id.
fn find_pairs(dir: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Read {
        path: dir.to_owned(),
        source,
    })?;
    let mut pred = BTreeMap::new();
    let mut gt = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|source| CliError::Read {
            path: dir.to_owned(),
            source,
        })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(id) = name.strip_suffix("_pred.pgm") {
            pred.insert(id.to_owned(), entry.path());
        } else if let Some(id) = name.strip_suffix("_gt.pgm") {
            gt.insert(id.to_owned(), entry.path());
        }
    }
    if pred.is_empty() && gt.is_empty() {
        return Err(CliError::Pairing(format!(
            "no <id>_pred.pgm / <id>_gt.pgm pairs in {}",
            dir.display()
        )));
    }
    if let Some(id) = pred.keys().find(|id| !gt.contains_key(*id)) {
        return Err(CliError::Pairing(format!("sample '{id}' has no _gt.pgm")));
    }
    if let Some(id) = gt.keys().find(|id| !pred.contains_key(*id)) {
        return Err(CliError::Pairing(format!("sample '{id}' has no _pred.pgm")));
    }
    Ok(pred
        .into_iter()
        .map(|(id, p)| {
            let g = gt[&id].clone();
            (id, p, g)
        })
        .collect())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    if !args.dir.is_dir() {
        return Err(CliError::Read {
            path: args.dir.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.dir.join("report.json"));
    require_output(&out)?;

    let pairs = find_pairs(&args.dir)?;
    let masks = pairs
        .iter()
        .map(|(id, p, g)| Ok((id.as_str(), load_mask(p)?, load_mask(g)?)))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<EvalSample<'_>> = masks
        .iter()
        .map(|(id, pred, gt)| EvalSample { id, pred, gt })
        .collect();
    let report = evaluate_batch(&samples, args.resolution_m)?;
    write(&out, report.to_json().as_bytes())?;
    print!("{}", report.to_table());
    println!("mIoU {:.3}", report.mean_iou);
    if let Some(rmse) = report.rmse_m2 {
        println!("RMSE {rmse:.3} m^2");
    }
    Ok(())
}

pub fn render(args: &RenderArgs) -> Result<()> {
    if args.landscape.is_none() && args.image.is_none() {
        return Err(CliError::Usage(
            "render needs --landscape or --image as background".into(),
        ));
    }
    if args.gt.is_empty() && args.pred.is_empty() {
        return Err(CliError::Usage("render needs at least one --gt or --pred contour".into()));
    }
    for p in args.landscape.iter().chain(&args.image).chain(&args.gt).chain(&args.pred) {
        require_input(p)?;
    }
    require_output(&args.out)?;

    let landscape = args.landscape.as_deref().map(load_landscape).transpose()?;
    let image = match &args.image {
        Some(path) => Some(image::open(path).map_err(|e| CliError::Parse {
            path: path.clone(),
            reason: e.to_string(),
        })?),
        None => None,
    };
    let background = match (image, &landscape) {
        (Some(img), Some(land)) => {
            if (img.height() as usize, img.width() as usize) != (land.height(), land.width()) {
                return Err(CliError::Dimensions(format!(
                    "image is {}x{} but landscape is {}x{}",
                    img.height(),
                    img.width(),
                    land.height(),
                    land.width()
                )));
            }
            Background::Image(img)
        }
        (Some(img), None) => Background::Image(img),
        (None, Some(land)) => Background::Landscape(land),
        (None, None) => unreachable!("checked above"),
    };

    let mut svg = Svg::new(background)?;
    for (path, is_gt) in args
        .gt
        .iter()
        .map(|p| (p, true))
        .chain(args.pred.iter().map(|p| (p, false)))
    {
        let pts = load_contour(path)?;
        if pts.len() < 3 {
            return Err(CliError::Parse {
                path: path.clone(),
                reason: format!("{} vertices do not form a closed contour", pts.len()),
            });
        }
        if let Some(p) = pts.iter().find(|p| !svg.contains(**p)) {
            return Err(CliError::Dimensions(format!(
                "{}: vertex ({}, {}) lies outside the {}x{} background",
                path.display(),
                p.x,
                p.y,
                svg.height(),
                svg.width()
            )));
        }
        if is_gt {
            svg.ground_truth(&pts);
        } else {
            svg.prediction(&pts);
        }
    }
    write(&args.out, svg.finish().as_bytes())
}
