use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sgdlab_cli::manifest::RunStatus;
use sgdlab_cli::{runner, CliError};

/// Laboratory for the stochastic dynamics of mini-batch SGD: simulate
/// diffusions and SGD runs, solve the Fokker–Planck equation, and compare
/// escape times and stationary probabilities against their closed forms.
#[derive(Parser)]
#[command(name = "sgdlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment described by a config file.
    Run {
        /// Path to a TOML or JSON experiment config.
        config: PathBuf,
    },
    /// Check a config file without running anything.
    Validate {
        /// Path to a TOML or JSON experiment config.
        config: PathBuf,
    },
    /// Re-verify a finished run directory against its manifest.
    Report {
        /// A directory produced by `sgdlab run`.
        run_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => runner::run(&config).map(|dir| {
            println!("run complete: {}", dir.display());
        }),
        Command::Validate { config } => runner::validate(&config).map(|warnings| {
            println!("config ok");
            for w in warnings {
                println!("warning: {w}");
            }
        }),
        Command::Report { run_dir } => runner::report(&run_dir).and_then(|(manifest, problems)| {
            println!("kind:      {}", manifest.kind);
            println!("seed:      {}", manifest.seed);
            println!("version:   {}", manifest.tool_version);
            println!("started:   {}", manifest.started);
            println!("finished:  {}", manifest.finished);
            println!(
                "status:    {}",
                match manifest.status {
                    RunStatus::Ok => "ok",
                    RunStatus::Failed => "failed",
                }
            );
            if let Some(e) = &manifest.error {
                println!("error:     {e}");
            }
            for w in &manifest.warnings {
                println!("warning:   {w}");
            }
            for (name, hash) in &manifest.outputs {
                println!("output:    {name}  sha256 {}", &hash[..12]);
            }
            let failed = manifest.status != RunStatus::Ok;
            if problems.is_empty() && !failed {
                println!("integrity: all {} files verified", manifest.outputs.len());
                Ok(())
            } else {
                let mut all = problems;
                if failed {
                    all.insert(0, "the run is marked failed in its manifest".into());
                }
                Err(CliError::Validation(all))
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
