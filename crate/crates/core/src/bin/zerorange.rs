use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zerorange::cli::{execute, exit_code, parse_config};
use zerorange::Error;

/// Run a zerorange configuration file.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Execute the command described by CONFIG.
    Run {
        config: PathBuf,
        /// Write here instead of the configured output path.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parse and validate CONFIG without running it.
    Check { config: PathBuf },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (config, output, check_only) = match args.action {
        Action::Run { config, output } => (config, output, false),
        Action::Check { config } => (config, None, true),
    };
    let text = match read(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let (status, err) = if check_only {
        match parse_config(&text) {
            Ok(cfg) => {
                println!("ok: {}", cfg.command.name());
                (0, None)
            }
            Err(e) => (exit_code(&e), Some(e)),
        }
    } else {
        execute(&text, output.as_deref())
    };
    if let Some(e) = err {
        eprintln!("error: {e}");
    }
    ExitCode::from(status as u8)
}
