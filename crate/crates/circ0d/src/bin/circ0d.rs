use clap::Parser;

fn main() {
    let cli = circ0d::cli::Cli::parse();
    std::process::exit(circ0d::cli::run(cli));
}
