mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::Internal;
use config::RunConfig;

const EXIT_INPUT: u8 = 1;
const EXIT_INTERNAL: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };

    let outcome = std::panic::catch_unwind(|| -> anyhow::Result<()> {
        let cfg = RunConfig::resolve(&cli.settings)?;
        if let Some(n) = cfg.workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| anyhow::anyhow!(Internal(e.to_string())))?;
        }
        commands::run(&cli.command, &cfg)
    });

    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Internal>().is_some() {
                ExitCode::from(EXIT_INTERNAL)
            } else {
                ExitCode::from(EXIT_INPUT)
            }
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
