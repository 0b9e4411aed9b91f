use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use wl_closure::cli::{execute, exit_code, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(err) => {
            let _ = out.flush();
            eprintln!("wlclose: {err}");
            exit_code(&err)
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
