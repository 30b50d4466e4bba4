use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use bunchlab::{run, Args, CliError};

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args).and_then(|report| emit(&args, &report.document).map(|()| report.exit_code)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn emit(args: &Args, document: &str) -> Result<(), CliError> {
    match &args.out {
        Some(path) => std::fs::write(path, document).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(document.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}
