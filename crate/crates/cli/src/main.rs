use std::process::ExitCode;

use clap::Parser;
use fracscreen_cli::{error_json, jsonout, output_dir, run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            return fail(&CliError::validation("threads", "must be positive"));
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli.command, &output_dir(cli.out_dir.as_deref())) {
        Ok(summary) => {
            print!("{}", jsonout::to_string_value(&summary));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprint!("{}", error_json(e));
    ExitCode::from(e.exit_code() as u8)
}
