use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qlocal_cli::run(std::env::args_os()))
}
