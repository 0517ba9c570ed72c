mod cli;
mod error;
mod run;
mod settings;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::Cli;
use crate::error::CliError;
use crate::settings::{resolve, Settings};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stochcell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn real_main(cli: Cli) -> Result<(), CliError> {
    let (kind, flags) = cli.command.split();
    let (file, config_dir) = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            (Settings::from_json(&text)?, path.parent().map(Path::to_path_buf))
        }
        None => (Settings::default(), None),
    };
    let settings = Settings::from_flags(&flags).over(file.over(Settings::defaults(kind)));
    if flags.show_config {
        let json = serde_json::to_string_pretty(&settings).expect("settings serialize");
        println!("{json}");
        return Ok(());
    }
    let spec = resolve(&settings, config_dir.as_deref())?;
    if let Some(n) = spec.threads {
        // ignore failure if a pool already exists; results do not depend on it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let output = run::execute(kind, &spec)?;
    match &flags.out {
        Some(path) => std::fs::write(path, output).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
