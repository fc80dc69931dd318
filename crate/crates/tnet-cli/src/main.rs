use std::process::ExitCode;

use tnet_cli::{run_command, CliError, Outcome};

fn main() -> ExitCode {
    match run_command(std::env::args_os()) {
        Ok((Outcome::Text(t), _)) => {
            print!("{}", t);
            ExitCode::SUCCESS
        }
        Ok((Outcome::Result(res), out)) => {
            let text = res.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        return fail(CliError::Data(format!("cannot write {}: {}", path.display(), e)));
                    }
                }
                None => print!("{}", text),
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.diagnostic());
    ExitCode::from(e.exit_code() as u8)
}
