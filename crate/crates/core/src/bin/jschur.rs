use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(joint_schur::cli::run(std::env::args_os()) as u8)
}
