use clap::Parser;

use rydpump_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = rydpump_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
