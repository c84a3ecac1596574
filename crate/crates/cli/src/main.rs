mod args;
mod error;
mod run;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let code = match run::execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
