use std::process::ExitCode;

use delayheat_cli::{dispatch, parse_config, Parsed};

fn main() -> ExitCode {
    let result = parse_config(std::env::args_os()).and_then(|parsed| match parsed {
        Parsed::Run(config) => dispatch(&config),
        Parsed::Display(text) => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("delayheat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
