use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cqed::cli::run(std::env::args_os()))
}
