use std::process::ExitCode;

use clap::Parser;
use pdm_dirac_cli::config::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    pdm_dirac_cli::exit(
        pdm_dirac_cli::configure_threads()
            .and_then(|_| RunConfig::resolve(kind, args))
            .and_then(|cfg| pdm_dirac_cli::run(&cfg)),
    )
}
