use clap::Parser;
use specklenet_cli::Cli;

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .init();

    if let Err(err) = specklenet_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
