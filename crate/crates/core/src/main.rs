use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use jetvar::cli::{ceiling_from_env, run, Args};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let d = serde_json::json!({ "error": "UsageError", "message": e.to_string() });
            eprintln!("{d}");
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let (code, stdout, stderr) = run(&args, ceiling_from_env());
    let _ = std::io::stdout().write_all(stdout.as_bytes());
    let _ = std::io::stderr().write_all(stderr.as_bytes());
    ExitCode::from(code as u8)
}
