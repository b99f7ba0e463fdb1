use std::process::ExitCode;

mod args;
mod run;

fn main() -> ExitCode {
    let config = match args::parse(std::env::args_os()) {
        Ok(config) => config,
        Err(args::ParseOutcome::Exit(code)) => return code,
        Err(args::ParseOutcome::Usage(message)) => {
            return run::fail(&run::CliError::Usage(message))
        }
    };
    match run::run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => run::fail(&e),
    }
}
