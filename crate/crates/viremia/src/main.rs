use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(viremia::cli::run(std::env::args_os()))
}
