//! `starshape` — simulation studies and nonparametric contour-shape
//! estimation for star-shaped distributions.
//!
//! Exit codes: 0 success, 2 parameter error, 3 I/O or parse error,
//! 4 numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use starshape::pipeline::StudyShape;
use starshape::Error;
use starshape_cli::commands::{cmd_convergence, cmd_estimate, cmd_reproduce, gauges_listing};
use starshape_cli::config::{parse_config_file, resolve_config, ConfigOverlay, RunConfig};

#[derive(Parser)]
#[command(
    name = "starshape",
    version,
    about = "Sampling, directional density estimation, and contour-shape recovery \
             for star-shaped distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct RunArgs {
    /// Flat key=value config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated sample sizes, e.g. 100,1000,10000.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated seeds, e.g. 0,1,2.
    #[arg(long)]
    seeds: Option<String>,
    /// Smoothing kernel: vonmises or uniform.
    #[arg(long)]
    kernel: Option<String>,
    /// Bandwidth: a positive number, 'cv', or 'schedule:power'.
    #[arg(long)]
    eta: Option<String>,
    /// Number of evaluation grid directions (>= 8).
    #[arg(long)]
    resolution: Option<usize>,
    /// Radial layers for star-body Hausdorff distances (>= 2).
    #[arg(long)]
    fill_resolution: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated artifact formats from {csv, json, svg}.
    #[arg(long)]
    format: Option<String>,
}

impl RunArgs {
    fn overlay(&self) -> ConfigOverlay {
        ConfigOverlay {
            shape: None,
            n: self.n.clone(),
            seeds: self.seeds.clone(),
            kernel: self.kernel.clone(),
            eta: self.eta.clone(),
            resolution: self.resolution,
            fill_resolution: self.fill_resolution,
            out: self.out.clone(),
            format: self.format.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the triangular-shape simulation study and write figures,
    /// boundary files, and the convergence table.
    ReproduceTriangle(RunArgs),
    /// Run the l_1/2-spherical simulation study (figures display the
    /// 10x-enlarged shapes).
    ReproduceLhalf(RunArgs),
    /// Estimate a contour shape from a sample file (CSV with header
    /// x1,...,xp or JSON {dimension, points}).
    Estimate {
        /// Input sample file.
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Full factorial convergence study over sample sizes and seeds,
    /// with a bandwidth-schedule condition report.
    Convergence {
        /// Target shape: triangle or lhalf.
        #[arg(long)]
        shape: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// List the built-in gauges and their exact constants.
    Gauges,
}

fn load_file_overlay(args: &RunArgs) -> Result<Option<ConfigOverlay>, Error> {
    match &args.config {
        None => Ok(None),
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Some(parse_config_file(&text, &path.display().to_string())?))
        }
    }
}

fn resolve(
    defaults: RunConfig,
    args: &RunArgs,
    shape_flag: Option<&str>,
) -> Result<RunConfig, Error> {
    let file = load_file_overlay(args)?;
    let mut flags = args.overlay();
    flags.shape = shape_flag.map(|s| s.to_string());
    resolve_config(defaults, file, flags)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::ReproduceTriangle(args) => {
            let cfg = resolve(
                RunConfig::reproduce_defaults(StudyShape::Triangle),
                &args,
                None,
            )?;
            let paths = cmd_reproduce(&cfg)?;
            report_artifacts(&paths);
        }
        Command::ReproduceLhalf(args) => {
            let cfg = resolve(
                RunConfig::reproduce_defaults(StudyShape::LHalf),
                &args,
                None,
            )?;
            let paths = cmd_reproduce(&cfg)?;
            report_artifacts(&paths);
        }
        Command::Estimate { input, run: args } => {
            let cfg = resolve(RunConfig::estimate_defaults(), &args, None)?;
            let paths = cmd_estimate(&input, &cfg)?;
            report_artifacts(&paths);
        }
        Command::Convergence { shape, run: args } => {
            let cfg = resolve(
                RunConfig::convergence_defaults(StudyShape::Triangle),
                &args,
                shape.as_deref(),
            )?;
            let paths = cmd_convergence(&cfg)?;
            report_artifacts(&paths);
        }
        Command::Gauges => {
            print!("{}", gauges_listing());
        }
    }
    Ok(())
}

fn report_artifacts(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) | Error::Selection(_) => 2,
        Error::Io(_) | Error::Parse { .. } => 3,
        Error::Numerical(_) => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
