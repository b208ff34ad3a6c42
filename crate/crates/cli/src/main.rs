use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(rbo_cli::run_command(std::env::args_os()) as u8)
}
