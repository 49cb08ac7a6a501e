use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use pccsens_cli::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors, not internal ones
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut stdout = io::BufWriter::new(io::stdout().lock());
    let mut stderr = io::stderr().lock();
    let code = run(&cli, &mut input, &mut stdout, &mut stderr);
    let _ = stdout.flush();
    ExitCode::from(code)
}
