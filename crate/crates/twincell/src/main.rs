use std::process::ExitCode;

fn main() -> ExitCode {
    twincell::cli::main_entry()
}
