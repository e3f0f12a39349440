//! `nlks`: run simulations, alpha sweeps, attractor studies and the operator
//! property suite from a JSON configuration file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlks::experiment::{self, RunConfig};
use nlks::{io, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PROPERTY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "nlks", version, about = "Nonlocal Kuramoto-Sivashinsky laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory and write its norms as CSV.
    Simulate(Common),
    /// Run the alpha sweep against the local equation and write a JSON report.
    Sweep(Common),
    /// Check the Hilbert identities, Poincare and Agmon on random fields.
    Properties(Common),
    /// Sample attractor clouds per alpha and write a JSON distance report.
    Attractor(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON configuration; omitted fields take their defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Overrides `initial.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `solver.alpha` and replaces both alpha grids with this value.
    #[arg(long)]
    alpha: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply_overrides(self.seed, self.alpha);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nlks: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE })
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Simulate(args) => {
            let cfg = args.load()?;
            let series = experiment::simulate(&cfg)?;
            io::save_norms(&args.out, &series)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            let cfg = args.load()?;
            let report = experiment::sweep(&cfg)?;
            io::save_json(&args.out, &report)?;
            for failed in &report.failed {
                eprintln!("alpha = {:e} failed: {}", failed.alpha, failed.error);
            }
            if let Some(fit) = &report.fit {
                println!("slope {:.4} from {} points", fit.slope, fit.used);
            } else if let Some(e) = &report.fit_error {
                println!("no fit: {e}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Properties(args) => {
            let cfg = args.load()?;
            let report = experiment::properties(&cfg)?;
            io::save_json(&args.out, &report)?;
            for check in &report.checks {
                let status = if check.passed() { "ok" } else { "FAIL" };
                println!(
                    "{status:4} {:32} worst {:.3e} slack {:.3e} failures {}",
                    check.name,
                    check.worst,
                    check.slack(),
                    check.failures
                );
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PROPERTY)
            })
        }
        Command::Attractor(args) => {
            let cfg = args.load()?;
            let report = experiment::attractor(&cfg)?;
            io::save_json(&args.out, &report)?;
            for failed in &report.failed {
                eprintln!("alpha = {:e} failed: {}", failed.alpha, failed.error);
            }
            for (alpha, d) in report.alphas().iter().zip(report.distances()) {
                println!("alpha {alpha:e}: distance {d:.6e}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
