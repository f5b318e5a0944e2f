use clap::Parser;

fn main() {
    let args = sspe_cli::Args::parse();
    std::process::exit(sspe_cli::run(&args));
}
