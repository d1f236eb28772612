use clap::Parser;

fn main() {
    let cli = clustermod_tool::cli::Cli::parse();
    std::process::exit(clustermod_tool::cli::run(cli));
}
