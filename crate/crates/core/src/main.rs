use std::process::ExitCode;

fn main() -> ExitCode {
    swarm_descent::cli::main_with_args(std::env::args())
}
