use clap::Parser;
use maass::cli::Cli;
use maass::{commands, exit_code, Outcome, EXIT_FAILURE, EXIT_SUCCESS};

fn main() {
    let cli = Cli::parse();
    let code = match commands::run(cli) {
        Ok(Outcome::Success) => EXIT_SUCCESS,
        Ok(Outcome::ChecksFailed) => EXIT_FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}
