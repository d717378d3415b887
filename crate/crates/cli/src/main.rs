use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(citeval::run(std::env::args_os()))
}
