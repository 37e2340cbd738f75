use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use logwave_core::{app, config::parse_config, Error};

#[derive(Parser)]
#[command(
    name = "logwave",
    version,
    about = "Penalized Galerkin runs for the damped logarithmic wave equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, env = "LOGWAVE_WORKERS")]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Single simulation: energy.csv and summary.csv.
    Run(Common),
    /// ε × m sweep: one directory per cell plus sweep_summary.csv.
    Sweep(Common),
    /// Potential-well status of the initial data.
    Well(Common),
    /// Inequality suites over the seeded corpus.
    Check(Common),
    /// Decay fit of an existing energy.csv.
    Fit(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Run(c) => ("run", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Well(c) => ("well", c),
        Command::Check(c) => ("check", c),
        Command::Fit(c) => ("fit", c),
    };
    let result = std::fs::read_to_string(&common.config)
        .map_err(Error::from)
        .and_then(|text| parse_config(&text))
        .and_then(|cfg| {
            let out = common.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
            match name {
                "run" => app::run(&cfg, &out),
                "sweep" => app::sweep(&cfg, &out, common.workers),
                "well" => app::well(&cfg, &out),
                "check" => app::check(&cfg, &out),
                _ => app::fit(&cfg, &out),
            }
        });
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for f in &outcome.failures {
                eprintln!("FAILED {f}");
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("logwave {name}: {e}");
            ExitCode::from(2)
        }
    }
}
