mod commands;
mod output;

use clap::Parser;
use commands::Cli;

/// Exit codes: 0 success, 1 usage, 2 capacity, 3 verification failure,
/// 4 simulation timeout budget exceeded.
fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output is a success, not a usage error
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    std::process::exit(commands::run(cli));
}
