use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(wentropy_cli::run_args(std::env::args().collect()))
}
