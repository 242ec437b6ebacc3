use std::process::ExitCode;

fn main() -> ExitCode {
    dec_sim::cli::main()
}
