use std::process::ExitCode;

use clap::Parser;

use valkit::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rendered = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("valkit: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &rendered.text),
        None => {
            print!("{}", rendered.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("valkit: cannot write output: {e}");
        return ExitCode::from(2);
    }
    match rendered.breach {
        Some(msg) => {
            eprintln!("valkit: tolerance breach: {msg}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
