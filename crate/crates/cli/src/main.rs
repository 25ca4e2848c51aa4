//! `jointprob`: tomograms, joint distributions, expectation values, evolution
//! residuals and the acceptance suite from the command line.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jointprob::tomography::RepKind;

use crate::config::RunConfig;

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_IO: u8 = 4;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  verification failure (at least one acceptance check failed)
  2  usage error (bad flags, state/prior/symbol specs, grids or configs)
  3  numeric failure (NaN, underflow, normalization drift, unstable step)
  4  I/O failure (unreadable input or unwritable output)";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(jointprob::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use jointprob::Error as E;
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Lib(e) => match e {
                E::Numeric(_)
                | E::Normalization { .. }
                | E::PriorUnderflow(_)
                | E::ImaginaryResidue { .. }
                | E::DegenerateDirection => EXIT_NUMERIC,
                E::Io(_) | E::Csv(_) | E::Json(_) => EXIT_IO,
                _ => EXIT_USAGE,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => f.write_str(m),
            Self::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<jointprob::Error> for CliError {
    fn from(e: jointprob::Error) -> Self {
        Self::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Lib(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Lib(e.into())
    }
}

#[derive(Parser, Debug)]
#[command(name = "jointprob", version, about = "Joint probability representation of oscillator states", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV, JSON and SVG files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Axis override `name:min,max,n` for x, mu, nu, theta, q or p (repeatable).
    #[arg(long, global = true)]
    pub grid: Vec<String>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed of the random test functions used by `verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rep {
    Symplectic,
    Optical,
}

impl From<Rep> for RepKind {
    fn from(r: Rep) -> Self {
        match r {
            Rep::Symplectic => RepKind::Symplectic,
            Rep::Optical => RepKind::Optical,
        }
    }
}

/// How tomograms are obtained from a state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Radon transform of the numerically computed Wigner function.
    Numeric,
    /// Closed-form slices (Gaussian and Fock states).
    Analytic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SymbolForm {
    Regular,
    Singular,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Evolution right-hand side: against ∂_t of the coherent trajectory, or zero otherwise.
    Evolution,
    /// Stationary-state equation at `--energy`.
    Stationary,
    /// Stationarity condition (zero imaginary part of the Hamiltonian action).
    Condition,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a tomogram and, with a prior, its joint distribution.
    Tomogram {
        /// State spec, e.g. `fock:n=0`, `coherent:re=0.7,im=0`, `gauss:q=0,p=0,s=2`.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        rep: Option<Rep>,
        /// Prior spec, e.g. `p1-default`, `p1:mu0=0,nu0=0,xi=1,zeta=1`, `p2-default`.
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, value_enum, default_value = "numeric")]
        method: Method,
        /// Also write SVG heatmaps (X vs θ, or X vs μ at `--svg-nu`).
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        svg_nu: f64,
    },
    /// Expectation value of an observable from its dual symbol.
    Expect {
        /// one, q, p, q2, p2, qp, pq, n (singular also qn(k), pn(k)).
        #[arg(long)]
        op: String,
        #[arg(long, value_enum, default_value = "regular")]
        symbol: SymbolForm,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        rep: Option<Rep>,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, value_enum, default_value = "numeric")]
        method: Method,
    },
    /// Residual of an evolution or stationary-state equation, as JSON.
    Residual {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, value_enum)]
        rep: Option<Rep>,
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        energy: Option<f64>,
        /// Also evaluate the printed kinetic operator and report its discrepancy.
        #[arg(long)]
        printed_form: bool,
        /// Use the closed single-peak form of the optical kinetic operator.
        #[arg(long)]
        single_peak: bool,
        /// Potential coefficients `c0,c1,c2,...` of `V(q) = Σ c_k qᵏ` (default harmonic).
        #[arg(long, allow_hyphen_values = true)]
        potential: Option<String>,
        /// Time along the coherent trajectory (evolution check of coherent states).
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Integrate the evolution equation with RK4 and write CSV frames.
    Evolve {
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        rep: Option<Rep>,
        #[arg(long)]
        prior: Option<String>,
        /// Time step; defaults to 0.8 of the estimated stability bound.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: usize,
        /// Write a frame every k steps (initial and final frames always).
        #[arg(long)]
        snapshot_every: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        potential: Option<String>,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Reconstruct the Wigner function from a symplectic tomogram.
    Reconstruct {
        /// State whose numeric tomogram is inverted (ignored with `--from`).
        #[arg(long)]
        state: Option<String>,
        /// Symplectic tomogram CSV written by `tomogram` (header `<stem>.json` beside it).
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long)]
        svg: bool,
    },
    /// Run the acceptance suite; exit 1 if any check fails.
    Verify {
        /// Comma-separated criterion numbers to run (default all).
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
        /// Energy used for the Fock(0) stationary check instead of ħω/2.
        #[arg(long)]
        fock0_energy: Option<f64>,
        #[arg(long)]
        random_functions: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Tomogram { .. } => "tomogram",
            Self::Expect { .. } => "expect",
            Self::Residual { .. } => "residual",
            Self::Evolve { .. } => "evolve",
            Self::Reconstruct { .. } => "reconstruct",
            Self::Verify { .. } => "verify",
        }
    }
}

/// Defaults, then the config file, then global flags.
fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.command = cli.command.name().to_string();
    if let Some(o) = &g.out {
        cfg.out = o.clone();
    }
    if let Some(h) = g.hbar {
        cfg.params.hbar = h;
    }
    if let Some(m) = g.mass {
        cfg.params.mass = m;
    }
    if let Some(w) = g.omega {
        cfg.params.omega = w;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    cfg.params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    config::apply_grids(&mut cfg.grids, &g.grid)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = effective_config(&cli).and_then(|cfg| commands::run(&cli, cfg));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
