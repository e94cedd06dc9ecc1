use clap::Parser;

fn main() {
    let cli = match cayley_cli::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(cayley_cli::main_with(&cli));
}
