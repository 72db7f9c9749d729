use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(vpr::cli::main_with(std::env::args_os()))
}
