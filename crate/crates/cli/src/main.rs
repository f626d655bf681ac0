use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = lrbounds_cli::run_cli(&args, &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
