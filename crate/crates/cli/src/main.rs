use std::process::ExitCode;

use clap::Parser;
use stringopt::app::{report, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(report(run(&cli)) as u8)
}
