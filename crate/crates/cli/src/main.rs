use clap::Parser;

fn main() {
    let cli = ruled_cli::Cli::parse();
    let mut out = String::new();
    let code = ruled_cli::run(&cli, &mut out);
    print!("{out}");
    std::process::exit(code);
}
