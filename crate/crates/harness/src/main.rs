use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lasso_lab_harness::cli::run(std::env::args()) as u8)
}
