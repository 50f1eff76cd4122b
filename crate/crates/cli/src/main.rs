use clap::Parser;

fn main() {
    let cli = nocmap_cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(f) = nocmap_cli::run(cli, &mut stdout.lock()) {
        eprintln!("nocmap: {f}");
        std::process::exit(f.code);
    }
}
