use std::process::ExitCode;

fn main() -> ExitCode {
    omegalab::cli::run_cli(std::env::args_os())
}
