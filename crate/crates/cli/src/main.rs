use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use screening_cli::commands::{self, Outcome, SimulateOptions};
use screening_cli::config::{parse_config_in, RunConfig};
use screening_core::props::SuiteOptions;

/// Multi-worker screening with information sharing.
#[derive(Parser)]
#[command(name = "screening", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one candidate profile against every equilibrium condition.
    Verify {
        #[arg(short, long)]
        config: PathBuf,
        /// Screening workers, e.g. "0,1,2"; empty for no screening.
        #[arg(long, default_value = "")]
        screening: String,
        /// Uniform first-period offer.
        #[arg(long)]
        wage: Option<f64>,
        /// One offer per screening worker, in id order.
        #[arg(long)]
        wages: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
    },
    /// List symmetric equilibria.
    Solve {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        require_equilibrium: bool,
    },
    /// Equilibrium outcome over a grid of one parameter, as CSV.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        /// One of rho, ell, beta, delta, p.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Monte-Carlo estimates against analytic payoffs, as CSV.
    Simulate {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Profile to play; defaults to the largest symmetric equilibrium.
        #[arg(long)]
        screening: Option<String>,
        #[arg(long)]
        wage: Option<f64>,
        #[arg(long)]
        wages: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Make the high type reject this worker.
        #[arg(long)]
        force_reject: Option<usize>,
        /// Write one CSV row per episode here.
        #[arg(long)]
        episodes: Option<PathBuf>,
    },
    /// Run the property suites.
    Checkprops {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        draws: usize,
        /// Fixed worker count for random draws.
        #[arg(long)]
        workers: Option<usize>,
        /// Suites to run; all when omitted.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

fn load(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config_in(&text, path.parent()).map_err(|e| format!("{}: {e}", path.display()))
}

fn dispatch(cmd: Command) -> Outcome {
    commands::run(|| match cmd {
        Command::Verify { config, screening, wage, wages, sigma } => {
            let cfg = load(&config)?;
            let cand = commands::candidate(&cfg, &screening, wage, wages.as_deref(), sigma)?;
            commands::cmd_verify(&cfg, &cand)
        }
        Command::Solve { config, require_equilibrium } => commands::cmd_solve(&load(&config)?, require_equilibrium),
        Command::Sweep { config, param, from, to, steps } => commands::cmd_sweep(&load(&config)?, &param, from, to, steps),
        Command::Simulate { config, trials, seed, screening, wage, wages, sigma, force_reject, episodes } => {
            let cfg = load(&config)?;
            let profile = screening.map(|s| commands::candidate(&cfg, &s, wage, wages.as_deref(), sigma)).transpose()?;
            let opts = SimulateOptions { trials, seed, profile, forced_reject: force_reject, episodes: episodes.as_deref() };
            commands::cmd_simulate(&cfg, opts)
        }
        Command::Checkprops { seed, draws, workers, suites } => commands::cmd_checkprops(&suites, SuiteOptions { seed, draws, workers }),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = dispatch(cli.command);
    print!("{}", out.stdout);
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
        if !out.stderr.ends_with('\n') {
            eprintln!();
        }
    }
    ExitCode::from(out.code as u8)
}
