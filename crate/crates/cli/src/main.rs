use clap::Parser;

fn main() {
    let args = sbforms_cli::Args::parse();
    std::process::exit(sbforms_cli::run(&args));
}
