use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use zenoclone_cli::commands;
use zenoclone_cli::config::{self, Format};
use zenoclone_cli::CliError;

#[derive(Parser)]
#[command(
    name = "zenoclone",
    version,
    about = "W-state generation and phase-covariant cloning between atomic ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one evolution and write its time series.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Regenerate a figure or the headline numbers and check them against the reference targets.
    Reproduce {
        /// fig2a, fig2b, fig3, fig4 or headline
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Points per sweep axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Also write a matplotlib script next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Run the sweep described in a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Run the invariant suite.
    Validate {
        /// Restrict to one module: model, zeno, dynamics, observables, experiments.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, hide = true)]
        inject: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            format,
        } => {
            let cfg = config::load(&config)?;
            let path = commands::simulate(&cfg, out.as_deref(), format.map(Into::into))?;
            println!("wrote {}", path.display());
        }
        Command::Sweep {
            config,
            out,
            format,
        } => {
            let cfg = config::load(&config)?;
            let path = commands::sweep(&cfg, out.as_deref(), format.map(Into::into))?;
            println!("wrote {}", path.display());
        }
        Command::Reproduce {
            id,
            out,
            grid,
            plot,
        } => {
            let outcome = commands::reproduce(&id, out.as_deref(), grid, plot)?;
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            for line in &outcome.targets {
                println!("{line}");
            }
            let failed = outcome
                .targets
                .iter()
                .filter(|t| !t.informational && !t.pass)
                .count();
            println!(
                "{id}: {} checks, {failed} failed",
                outcome.targets.iter().filter(|t| !t.informational).count()
            );
        }
        Command::Validate { only, inject } => {
            let report = commands::validate(only.as_deref(), inject.as_deref())?;
            for check in &report.checks {
                println!("{check}");
            }
            println!(
                "{} checks, {} failed",
                report.checks.len(),
                report.failures().count()
            );
            commands::validation_verdict(&report)?;
        }
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
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
