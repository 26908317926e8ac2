use std::io::stdout;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = hybrid_bell_cli::run(std::env::args_os(), &mut stdout().lock());
    ExitCode::from(code)
}
