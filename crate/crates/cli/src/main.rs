use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dsm_vcg::cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::PropertyViolation { output, .. } = &e {
                let _ = stdout.write_all(output.as_bytes());
            }
            eprintln!("dsm-vcg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
