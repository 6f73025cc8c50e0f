use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = bcstab_cli::args::Cli::parse();
    match bcstab_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
