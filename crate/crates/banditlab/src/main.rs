use std::process::ExitCode;

fn main() -> ExitCode {
    banditlab::cli::main()
}
