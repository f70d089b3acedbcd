use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = qgame_core::cli::main_with_args(std::env::args().skip(1), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
