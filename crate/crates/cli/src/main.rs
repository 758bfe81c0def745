//! `afk`: limit sets, Gauss-equation solves, certificates and barrier
//! experiments from the command line.

mod commands;
mod output;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "afk", version, about = "Almost-Fuchsian limit-set certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "afk-out")]
    pub out: PathBuf,
    /// Worker thread cap.
    #[arg(long, global = true, env = "AFK_THREADS", value_parser = positive_usize)]
    pub threads: Option<usize>,
    /// Height of each chart in pixels; renders are twice as wide.
    #[arg(long, global = true, default_value_t = 512, value_parser = positive_usize)]
    pub image_size: usize,
    /// Also write SVG renders.
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the limit set of a group and render it.
    LimitSet(LimitSetArgs),
    /// Solve the Gauss equation for a holomorphic quadratic differential.
    Solve(SolveArgs),
    /// Run solve, integrate, Gauss map and certificate.
    Certify(CertifyArgs),
    /// Empty-ball radii and Hausdorff steps along a family of groups.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct LimitSetArgs {
    #[arg(long)]
    pub group: PathBuf,
    /// Maximal reduced word length.
    #[arg(long, default_value_t = 6, value_parser = positive_usize)]
    pub depth: usize,
    /// Refuse to enumerate more reduced words than this.
    #[arg(long, default_value_t = 100_000_000, value_parser = positive_u128)]
    pub max_words: u128,
    /// Lattice resolution of the empty-ball search.
    #[arg(long, default_value_t = 120, value_parser = positive_usize)]
    pub resolution: usize,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Nodes per side of the square grid (odd).
    #[arg(long, default_value_t = afk_core::gauss_equation::DEFAULT_GRID_SIDE, value_parser = positive_usize)]
    pub grid: usize,
    /// Euclidean radius of the coordinate disk.
    #[arg(long, default_value_t = afk_core::gauss_equation::DEFAULT_DISK_RADIUS, value_parser = positive_f64)]
    pub radius: f64,
    /// Newton residual tolerance.
    #[arg(long, default_value_t = afk_core::gauss_equation::DEFAULT_TOLERANCE, value_parser = positive_f64)]
    pub tol: f64,
    #[arg(long, default_value_t = afk_core::gauss_equation::DEFAULT_MAX_ITER, value_parser = positive_usize)]
    pub max_iter: usize,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// JSON list of Taylor coefficients `[re, im]`.
    #[arg(long)]
    pub alpha: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// Defaults to the zero differential.
    #[arg(long)]
    pub alpha: Option<PathBuf>,
    #[arg(long, default_value_t = 6, value_parser = positive_usize)]
    pub depth: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0.5, value_parser = positive_f64)]
    pub c_epstein: f64,
    #[arg(long, default_value_t = 4.0, value_parser = positive_f64)]
    pub c_koebe: f64,
    #[arg(long, default_value_t = 0.1, value_parser = positive_f64)]
    pub epsilon_target: f64,
    #[arg(long, default_value_t = 0.05, value_parser = positive_f64)]
    pub slack: f64,
    /// Extra sample point `re,im` (or `inf`); repeatable.
    #[arg(long, value_parser = boundary_point)]
    pub inject: Vec<afk_core::moebius::BoundaryPoint>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Group files in family order; repeatable.
    #[arg(long)]
    pub group: Vec<PathBuf>,
    /// Build the family by conjugating a single group by `diag(λ, 1/λ)`.
    #[arg(long, value_delimiter = ',', value_parser = positive_f64)]
    pub dilations: Vec<f64>,
    #[arg(long, default_value_t = 6, value_parser = positive_usize)]
    pub depth: usize,
    #[arg(long, default_value_t = 60, value_parser = positive_usize)]
    pub resolution: usize,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u128(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn boundary_point(s: &str) -> Result<afk_core::moebius::BoundaryPoint, String> {
    if s.trim() == "inf" {
        return Ok(afk_core::moebius::BoundaryPoint::Infinity);
    }
    let (re, im) = s.split_once(',').ok_or("expected re,im")?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err("coordinates must be finite; use 'inf' for infinity".into());
    }
    Ok(afk_core::moebius::BoundaryPoint::from_re_im(re, im))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(output::EXIT_RESOURCE as u8);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
