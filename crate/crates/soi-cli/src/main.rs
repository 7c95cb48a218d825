//! `soi`: volumes, coarse-graining, and fidelity analyses of purification
//! manifolds, emitted as deterministic CSV/JSON artifacts.
//!
//! Every run writes its resolved configuration next to the results; re-running
//! with `--config <file>` reproduces the output files bit for bit.

mod config;
mod emit;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "soi",
    about = "Purification-manifold volumes and entanglement coarse-graining",
    version
)]
struct Cli {
    /// Re-execute a run from an emitted config file (exclusive with a command).
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// One volume evaluation by closed form, quadrature, or Monte Carlo.
    Volume(VolumeArgs),
    /// Normalized volume/entropy curves over a spectrum grid (CSV).
    Curves(CurvesArgs),
    /// Discretize the simplex and bin cells into macrostate segments (CSV pair).
    CoarseGrain(CoarseGrainArgs),
    /// Product-formula vs Monte Carlo normalized volumes on random 4-spectra.
    So4Compare(So4CompareArgs),
    /// Large-N thresholds, volume mass ratios, and tail entropy averages.
    Asymptotics(AsymptoticsArgs),
    /// Uhlmann fidelity, closed form or purification-family maximization.
    Fidelity(FidelityArgs),
}

#[derive(Args)]
struct VolumeArgs {
    /// Chart group: su2 or soN (so2, so3, so4, ...).
    #[arg(long)]
    group: String,
    /// Comma-separated eigenvalues summing to 1.
    #[arg(long, value_delimiter = ',', required = true)]
    spectrum: Vec<f64>,
    /// closed, quadrature, or mc.
    #[arg(long)]
    method: String,
    /// Gauss-Legendre nodes per axis (quadrature).
    #[arg(long, default_value_t = soi_core::volume::DEFAULT_NODES_PER_AXIS)]
    nodes: usize,
    /// Sample count (mc).
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Stream seed (mc).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: String,
}

#[derive(Args)]
struct CurvesArgs {
    /// su2 or so3.
    #[arg(long)]
    group: String,
    /// Grid points per eigenvalue axis.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, default_value = ".")]
    out: String,
}

#[derive(Args)]
struct CoarseGrainArgs {
    /// Cells per eta axis (the simplex gets ell^2 cells).
    #[arg(long, default_value_t = 300)]
    ell: usize,
    /// Number of macrostate segments.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Observables to bin by: volume, von-neumann, linear.
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = ["volume".to_string(), "von-neumann".to_string(), "linear".to_string()]
    )]
    observable: Vec<String>,
    /// Restrict to the distortion-free chamber (eta1 > 1/4, eta2 > 1/2).
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    weyl_filter: bool,
    #[arg(long, default_value = ".")]
    out: String,
}

#[derive(Args)]
struct So4CompareArgs {
    /// Number of uniformly sampled 4-spectra.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Monte Carlo samples per spectrum.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: String,
}

#[derive(Args)]
struct AsymptoticsArgs {
    /// Dimensions to analyze.
    #[arg(long = "n-list", value_delimiter = ',', default_values_t = [3usize, 5, 7, 11, 30])]
    n_list: Vec<usize>,
    /// Normalized-volume level defining lambda1*.
    #[arg(long, default_value_t = 1e-4)]
    level: f64,
    /// Tail-average weighting: uniform or volume.
    #[arg(long, default_value = "uniform")]
    weighting: String,
    #[arg(long, default_value = ".")]
    out: String,
}

#[derive(Args)]
struct FidelityArgs {
    /// Eigenvalues of the first state.
    #[arg(long, value_delimiter = ',', required = true)]
    rho: Vec<f64>,
    /// Eigenvalues of the second state.
    #[arg(long, value_delimiter = ',', required = true)]
    sigma: Vec<f64>,
    /// U(N)-chart parameters rotating the first state's eigenbasis.
    #[arg(long = "rho-basis", value_delimiter = ',')]
    rho_basis: Option<Vec<f64>>,
    /// U(N)-chart parameters rotating the second state's eigenbasis.
    #[arg(long = "sigma-basis", value_delimiter = ',')]
    sigma_basis: Option<Vec<f64>>,
    /// closed or soi.
    #[arg(long, default_value = "closed")]
    method: String,
    /// Random starts for the soi search.
    #[arg(long, default_value_t = 20)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: String,
}

impl Command {
    fn into_config(self) -> RunConfig {
        match self {
            Command::Volume(a) => RunConfig::Volume {
                group: a.group,
                spectrum: a.spectrum,
                method: a.method,
                nodes: a.nodes,
                samples: a.samples,
                seed: a.seed,
                out: a.out,
            },
            Command::Curves(a) => RunConfig::Curves {
                group: a.group,
                grid: a.grid,
                out: a.out,
            },
            Command::CoarseGrain(a) => RunConfig::CoarseGrain {
                ell: a.ell,
                k: a.k,
                observables: a.observable,
                weyl_filter: a.weyl_filter,
                out: a.out,
            },
            Command::So4Compare(a) => RunConfig::So4Compare {
                count: a.count,
                samples: a.samples,
                seed: a.seed,
                out: a.out,
            },
            Command::Asymptotics(a) => RunConfig::Asymptotics {
                n_list: a.n_list,
                level: a.level,
                weighting: a.weighting,
                out: a.out,
            },
            Command::Fidelity(a) => RunConfig::Fidelity {
                rho: a.rho,
                sigma: a.sigma,
                rho_basis: a.rho_basis.unwrap_or_default(),
                sigma_basis: a.sigma_basis.unwrap_or_default(),
                method: a.method,
                budget: a.budget,
                seed: a.seed,
                out: a.out,
            },
        }
    }
}

/// SOI_THREADS caps worker parallelism; default is hardware concurrency.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SOI_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SOI_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn resolve_config(cli: Cli) -> Result<RunConfig, CliError> {
    match (cli.config, cli.command) {
        (Some(path), None) => RunConfig::load(&path),
        (None, Some(command)) => Ok(command.into_config()),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--config and a command are mutually exclusive".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "nothing to do: give a command or --config <file> (see --help)".into(),
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| resolve_config(cli))
        .and_then(|config| run::execute(&config).map(|_| ()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("soi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
