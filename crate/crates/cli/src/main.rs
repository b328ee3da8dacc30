//! `activerays` command-line front end.

mod commands;
mod error;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use activerays::geometry::{CapMode, DEFAULT_VERTICES};
use activerays::Point;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "activerays", version, about = "Polar active-contour building outline extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize an energy landscape and ground-truth mask from a shape spec.
    Synth(SynthArgs),
    /// Evolve an initial circle over a landscape.
    Evolve(EvolveArgs),
    /// Score `<id>_pred.pgm` / `<id>_gt.pgm` pairs in a directory.
    Eval(EvalArgs),
    /// Draw contours over a landscape or image as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Shape spec (JSON).
    pub spec: PathBuf,
    /// Output landscape (EMAP).
    #[arg(long)]
    pub out: PathBuf,
    /// Output ground-truth mask (PGM).
    #[arg(long)]
    pub mask: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CapArg {
    Global,
    PerRay,
}

impl From<CapArg> for CapMode {
    fn from(c: CapArg) -> Self {
        match c {
            CapArg::Global => CapMode::Global,
            CapArg::PerRay => CapMode::PerRay,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub landscape: PathBuf,
    /// Reference point `x,y`; defaults to the image center.
    #[arg(long, value_parser = parse_point)]
    pub init_center: Option<Point>,
    /// Initial radius in pixels.
    #[arg(long, conflicts_with = "init_radius_frac")]
    pub init_radius: Option<f64>,
    /// Initial radius as a fraction of the smallest ray cap.
    #[arg(long, default_value_t = 0.25)]
    pub init_radius_frac: f64,
    #[arg(long = "vertices", default_value_t = DEFAULT_VERTICES)]
    pub vertices: usize,
    #[arg(long, value_enum, default_value_t = CapArg::Global)]
    pub cap_mode: CapArg,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub rho_floor: f64,
    #[arg(long)]
    pub no_backtracking: bool,
    /// Output contour (CSV).
    #[arg(long)]
    pub out: PathBuf,
    /// Output solver trace (JSON).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub dir: PathBuf,
    /// Ground resolution; enables area and RMSE columns.
    #[arg(long)]
    pub resolution_m: Option<f64>,
    /// Report JSON path [default: <DIR>/report.json].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Landscape whose D map becomes the background.
    #[arg(long)]
    pub landscape: Option<PathBuf>,
    /// Source image used as background instead of the D map.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Ground-truth contour CSV (drawn blue).
    #[arg(long)]
    pub gt: Vec<PathBuf>,
    /// Predicted contour CSV (drawn yellow).
    #[arg(long)]
    pub pred: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Point::new(num(x)?, num(y)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Render(a) => commands::render(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
