use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fano_forge::singtest::Mode;
use fano_forge::Execution;
use fano_forge_cli::commands::{self, ClassifyArgs, StatsBy};
use fano_forge_cli::{with_jobs, CliError, Result};

#[derive(Parser)]
#[command(name = "fano-forge", version, about = "Canonical and terminal fake weighted projective spaces")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "FANO_FORGE_THREADS")]
    jobs: Option<usize>,
    /// Run single-threaded without the rayon executor.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify minimal degree matrices and write one JSON record per class.
    Classify {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Classify only the weight vectors listed in this file.
        #[arg(long)]
        weights_file: Option<PathBuf>,
        /// Journal of finished weight vectors; an interrupted run resumes from it.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Store the reconstructed simplex in each record.
        #[arg(long)]
        with_simplex: bool,
    },
    /// Recheck every record; exits with status 2 if any fails.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Add Fine interiors to a record file.
    Fine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate a record file into CSV.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = |s: &str| s.parse::<StatsBy>())]
        by: StatsBy,
        /// One value per record, added as a grouping column.
        #[arg(long)]
        extra_column: Option<PathBuf>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: fano_forge::Error| e.to_string())
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Classify {
            dim,
            mode,
            weights_file,
            checkpoint,
            out,
            with_simplex,
        } => {
            let args = ClassifyArgs {
                dim,
                mode,
                weights_file,
                checkpoint,
                out,
                with_simplex,
            };
            let (new, total) = with_jobs(cli.jobs, || commands::classify(&args, exec))??;
            eprintln!("{total} records ({new} new) in {}", args.out.display());
        }
        Command::Verify { input } => {
            let stdout = std::io::stdout();
            let report = with_jobs(cli.jobs, || commands::verify(&input, exec, &mut stdout.lock()))??;
            if report.failures > 0 {
                return Err(CliError::VerifyFailed(report.failures));
            }
        }
        Command::Fine { input, out } => {
            let n = with_jobs(cli.jobs, || commands::fine(&input, &out, exec))??;
            eprintln!("{n} records in {}", out.display());
        }
        Command::Stats {
            input,
            by,
            extra_column,
            out,
        } => match out {
            Some(path) => {
                let f = std::fs::File::create(&path).map_err(CliError::io(&path))?;
                commands::stats(&input, by, extra_column.as_deref(), f)?;
            }
            None => {
                let stdout = std::io::stdout();
                commands::stats(&input, by, extra_column.as_deref(), stdout.lock())?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
