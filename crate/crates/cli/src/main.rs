use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use microlax::scenario::{run_scenario, Dims, KdvParams, Report, Scenario};

/// Exact microdifferential Lax-matrix toolkit.
#[derive(Parser, Debug)]
#[command(name = "microlax", version)]
struct Cli {
    /// Default degree cap for generic series data.
    #[arg(long, global = true, env = "MICROLAX_CAP")]
    cap: Option<i64>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file.
    Run { file: PathBuf },
    /// Scalar Lax flow of `xi^r + u`.
    Kdv {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 3)]
        j: u32,
        #[arg(long, default_value_t = 3)]
        torder: i64,
        /// Second flow; adds the zero-curvature check.
        #[arg(long)]
        j2: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Normalize generic data for a degree vector and print the recipe.
    Normalize {
        #[arg(long, default_value = "previous-entry")]
        policy: String,
        /// Comma-separated, e.g. 2,3,3,3,4.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        degrees: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Eliminate random local matrices of size d over an n-dimensional base.
    Eliminate {
        /// `d,n`.
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "3,2")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        cases: u64,
    },
    /// Run a built-in suite with default parameters.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        cases: Option<u64>,
    },
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    let mut s = match &cli.command {
        Command::Run { file } => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            Scenario::from_toml(&text)?
        }
        Command::Kdv { r, j, torder, j2, seed } => {
            let mut s = Scenario::new("kdv");
            s.kdv = Some(KdvParams { r: *r, j: *j, j2: *j2 });
            s.caps.torder = *torder;
            s.seed = *seed;
            s
        }
        Command::Normalize { policy, degrees, seed } => {
            let mut s = Scenario::new("normalize");
            s.policy = policy.clone();
            s.degrees = degrees.clone();
            s.dims.d = degrees.len().max(1);
            s.seed = *seed;
            s
        }
        Command::Eliminate { dims, seed, cases } => {
            let [d, n] = dims[..] else { anyhow::bail!("--dims takes d,n") };
            let mut s = Scenario::new("elimination");
            s.dims = Dims { n, d };
            s.seed = *seed;
            s.cases = Some(*cases);
            s
        }
        Command::Check { suite, seed, cases } => {
            let mut s = Scenario::new(suite);
            s.seed = *seed;
            s.cases = *cases;
            if suite == "kdv" {
                s.kdv = Some(KdvParams { r: 2, j: 3, j2: Some(5) });
                s.caps.torder = 2;
            }
            s
        }
    };
    if let (Some(cap), false) = (cli.cap, matches!(cli.command, Command::Run { .. })) {
        s.caps.series = cap;
    }
    Ok(s)
}

fn execute(cli: &Cli) -> Result<Report> {
    let s = scenario(cli)?;
    let report = run_scenario(&s)?;
    if let Some(path) = &cli.out {
        fs::write(path, report.to_string()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            print!("{report}");
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
