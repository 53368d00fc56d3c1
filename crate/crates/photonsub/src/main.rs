use std::process::ExitCode;

fn main() -> ExitCode {
    photonsub::cli::main_entry()
}
