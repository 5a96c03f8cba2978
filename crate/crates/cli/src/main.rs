#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Serialize)]
#[command(name = "gamma-bialg", version, about = "Gamma-function bialgebraicity experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Report format; `text` is only offered by `gamma`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Leave the duration out so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Evaluate Gamma, log Gamma or the real map G at points or on a grid.
    Gamma(GammaArgs),
    /// Trace a real curve, map it through G and test the image for an algebraic relation.
    Bialg(BialgArgs),
    /// Negative-axis extrema, positive-axis minimum and the surjectivity sweep.
    Axis(AxisArgs),
    /// Crossings of the imaginary-axis image with the real axis.
    Spiral(SpiralArgs),
    /// Points (m!, n!) on a curve, valuation certificates and classification.
    Factorial(FactorialArgs),
    /// Branches at infinity from the Newton polygon.
    Puiseux(PuiseuxArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Func {
    Gamma,
    LogGamma,
    /// `(x, y) -> (Re Gamma(x+iy), Im Gamma(x+iy))`
    G,
}

#[derive(Args, Serialize, Debug)]
#[command(group(ArgGroup::new("points").required(true).multiple(true).args(["z", "grid"])))]
pub struct GammaArgs {
    /// Point `re,im`; repeatable.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub z: Vec<[f64; 2]>,
    /// Grid `xmin,xmax,ymin,ymax,nx,ny`.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    #[arg(long, value_enum, default_value_t = Func::Gamma)]
    pub func: Func,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Args, Serialize, Debug)]
pub struct BialgArgs {
    #[arg(long, value_parser = parse_poly_arg)]
    pub poly: String,
    /// Box `xmin,xmax,ymin,ymax`.
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true, default_value = "-3,3,-3,3")]
    pub rect: [f64; 4],
    #[arg(long, default_value_t = 6)]
    pub max_degree: usize,
    /// Image samples kept for fitting.
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    /// Fewest image samples accepted; defaults to ten times the basis size.
    #[arg(long)]
    pub min_samples: Option<usize>,
    /// Trace step; defaults to the box diagonal over 400.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 24)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 64)]
    pub max_seeds: usize,
    #[arg(long, default_value_t = 20_000)]
    pub steps_per_trace: usize,
    /// Image points with |G| above this are dropped.
    #[arg(long, default_value_t = 1e6)]
    pub magnitude_cap: f64,
    #[arg(long, default_value_t = 8)]
    pub irreducibility_trials: usize,
}

#[derive(Args, Serialize, Debug)]
pub struct AxisArgs {
    /// Extrema M_0..M_N and m_0..m_N.
    #[arg(long, default_value_t = 5)]
    pub n_max: u32,
    /// Targets in the surjectivity sweep.
    #[arg(long, default_value_t = 1000)]
    pub sweep: usize,
    /// Points t in [0.1, 20] for the modulus identity.
    #[arg(long, default_value_t = 200)]
    pub modulus_points: usize,
}

#[derive(Args, Serialize, Debug)]
pub struct SpiralArgs {
    #[arg(long, default_value_t = 40.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Values of t for Im log Gamma(it) / (t ln t).
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub ratio_t: Vec<f64>,
    /// Also write the track (t, Re, Im of Gamma(it)) as CSV here.
    #[arg(long)]
    pub track: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub track_from: f64,
    /// Defaults to `--t-max`.
    #[arg(long)]
    pub track_to: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub track_samples: usize,
}

#[derive(Args, Serialize, Debug)]
pub struct FactorialArgs {
    #[arg(long, value_parser = parse_poly_arg)]
    pub poly: String,
    #[arg(long, default_value_t = 20)]
    pub m_max: u64,
    /// Defaults to `--m-max`.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Primes for valuation certificates; defaults to p <= 20 and the largest prime <= m.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Points needed before a line is called out.
    #[arg(long, default_value_t = 10)]
    pub threshold: usize,
    #[arg(long, default_value_t = gamma_bialg::factorial::DEFAULT_CAP)]
    pub cap: u64,
}

#[derive(Args, Serialize, Debug)]
pub struct PuiseuxArgs {
    #[arg(long, value_parser = parse_poly_arg)]
    pub poly: String,
    /// Further terms per simple branch.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Positive increasing X values for the residual table.
    #[arg(long, value_delimiter = ',', default_value = "100,10000,1000000")]
    pub x_values: Vec<f64>,
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers"));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
        if !o.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

fn parse_box(s: &str) -> Result<[f64; 4], String> {
    let b = parse_floats::<4>(s)?;
    if b[0] >= b[1] || b[2] >= b[3] {
        return Err("box needs xmin < xmax and ymin < ymax".into());
    }
    Ok(b)
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let v = parse_floats::<6>(s)?;
    let count = |f: f64| {
        if f >= 1.0 && f.fract() == 0.0 && f <= 1e6 {
            Ok(f as usize)
        } else {
            Err(format!("grid counts must be positive integers, got {f}"))
        }
    };
    if v[0] > v[1] || v[2] > v[3] {
        return Err("grid needs xmin <= xmax and ymin <= ymax".into());
    }
    Ok(Grid {
        xmin: v[0],
        xmax: v[1],
        ymin: v[2],
        ymax: v[3],
        nx: count(v[4])?,
        ny: count(v[5])?,
    })
}

fn parse_poly_arg(s: &str) -> Result<String, String> {
    gamma_bialg::poly::parse_poly(s)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

/// Exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

#[derive(Debug)]
pub enum Failure {
    Usage(UsageError),
    Domain(gamma_bialg::Error),
}

impl From<gamma_bialg::Error> for Failure {
    fn from(e: gamma_bialg::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("GAMMA_BIALG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("GAMMA_BIALG_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<(), Failure> {
        configure_threads()?;
        let g = &cli.global;
        match &cli.command {
            Command::Gamma(a) => commands::gamma(g, a, &cli),
            Command::Bialg(a) => commands::bialg(g, a, &cli),
            Command::Axis(a) => commands::axis(g, a, &cli),
            Command::Spiral(a) => commands::spiral(g, a, &cli),
            Command::Factorial(a) => commands::factorial(g, a, &cli),
            Command::Puiseux(a) => commands::puiseux(g, a, &cli),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(UsageError(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
