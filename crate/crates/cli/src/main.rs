mod cli;
mod commands;
mod config;
mod error;
mod output;

use clap::Parser;

use dirac_stability::Exec;

use crate::cli::{Cli, Command, Common};
use crate::config::{Extra, Settings};
use crate::error::{CliError, CliResult};

/// Sequential for `--jobs 1`; otherwise parallel, sized to `--jobs` when given.
fn executor(jobs: Option<usize>) -> CliResult<Exec> {
    match jobs {
        Some(0) => Err(CliError::Config("--jobs must be at least 1".into())),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(k) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))?;
            Ok(Exec::Parallel)
        }
        _ => Ok(Exec::Parallel),
    }
}

fn settings(common: &Common, extra: Extra) -> CliResult<(Settings, Exec)> {
    let s = Settings::resolve(common, extra)?;
    let exec = executor(s.jobs)?;
    Ok((s, exec))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Soliton(a) => {
            let extra = Extra {
                points: a.points,
                x_max: a.x_max,
                allow_limit: a.allow_limit,
                ..Extra::default()
            };
            let (s, _) = settings(&a.common, extra)?;
            commands::soliton(&s)
        }
        Command::Asymptotics(a) => {
            let extra = Extra {
                omega_range: a.omega_range,
                ..Extra::default()
            };
            let (s, exec) = settings(&a.common, extra)?;
            commands::asymptotics(&s, exec)
        }
        Command::Spectrum(a) => {
            let extra = Extra {
                matrix_out: a.matrix_out,
                ..Extra::default()
            };
            let (s, _) = settings(&a.common, extra)?;
            commands::spectrum(&s)
        }
        Command::Sweep(a) => {
            let (s, exec) = settings(&a.common, Extra::default())?;
            commands::sweep(&s, exec)
        }
        Command::Validate(a) => {
            let extra = Extra {
                ns: a.ns,
                ..Extra::default()
            };
            let (s, exec) = settings(&a.common, extra)?;
            commands::validate(&s, exec)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    if let Err(e) = run(Cli::parse()) {
        if e.is_broken_pipe() {
            return;
        }
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
