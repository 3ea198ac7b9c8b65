use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scf_cli::commands;
use scf_cli::error::{CliError, CliResult};
use scf_cli::RunConfig;

#[derive(Parser)]
#[command(name = "scf", version, about = "Spectrally constrained correction of sets on finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (run, sweep, demo) or run directory (verify).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Skip the sufficiency and coordination checks.
    #[arg(long, global = true)]
    no_checks: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the construction and write report.json, b.json, spectrum.csv, spectrum.svg, fields.json.
    Run,
    /// Recompute the report of a run directory and compare.
    Verify {
        /// Run directory (defaults to --out).
        dir: Option<PathBuf>,
    },
    /// Log-law sweep over the config's eps_list; writes sweep.csv and fit.json.
    Sweep,
    /// Run and verify a built-in Z_256 example.
    Demo,
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    Ok(RunConfig::load(path)?.with_overrides(cli.seed, cli.no_checks))
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Run => {
            let dir = commands::run(&load(cli)?, cli.out.as_deref())?;
            println!("wrote {}", dir.display());
        }
        Command::Verify { dir } => {
            let dir = dir
                .clone()
                .or_else(|| cli.out.clone())
                .ok_or_else(|| CliError::Config("verify needs a run directory".into()))?;
            commands::verify(&dir)?;
            println!("{}: report matches", dir.display());
        }
        Command::Sweep => {
            let dir = commands::sweep(&load(cli)?, cli.out.as_deref())?;
            println!("wrote {}", dir.display());
        }
        Command::Demo => {
            let dir = commands::demo(cli.out.as_deref(), cli.seed, cli.no_checks)?;
            println!("demo written to {} and verified", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCF_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Mismatch(fields) = &e {
                for f in fields {
                    println!("mismatch {f}");
                }
            }
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
