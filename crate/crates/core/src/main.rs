use std::process::ExitCode;

fn main() -> ExitCode {
    monopole_moduli::cli::main_with_args(std::env::args_os())
}
