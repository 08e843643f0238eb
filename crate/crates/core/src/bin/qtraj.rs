use clap::Parser;
use qtraj::cli::{run_cli, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run_cli(&cli));
}
