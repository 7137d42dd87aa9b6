use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use gcdseq_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(err), _) => {
            eprintln!("gcdseq: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
        (Ok(()), Err(err)) if err.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        (Ok(()), Err(err)) => {
            eprintln!("gcdseq: {err}");
            ExitCode::FAILURE
        }
    }
}
