use clap::Parser;

fn main() {
    let cli = ptroad::app::Cli::parse();
    if let Err(e) = ptroad::app::run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
