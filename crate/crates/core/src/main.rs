use clap::Parser;

fn main() {
    let cli = robust_coin::cli::Cli::parse();
    std::process::exit(robust_coin::cli::main_with(cli));
}
