use clap::Parser;

fn main() {
    std::process::exit(maxfilt_cli::run(maxfilt_cli::Cli::parse()));
}
