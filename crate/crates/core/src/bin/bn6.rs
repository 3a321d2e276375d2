use clap::Parser;

fn main() {
    let cli = bn6::cli_report::Cli::parse();
    std::process::exit(bn6::cli_report::main_with(&cli));
}
