use std::io::Write;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;
use fermatlab::{run, Cli, CliError, RunConfig};

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FERMATLAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Parameter(format!("FERMATLAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Parameter(e.to_string()))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(cli)?;
    init_threads()?;
    let mut outcome = run(&cfg)?;
    if !cfg.options.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        outcome.report.generated_unix = Some(secs);
    }
    let json = outcome.report.to_json();
    match &cfg.options.out {
        Some(path) => std::fs::write(path, json)?,
        None => std::io::stdout().lock().write_all(json.as_bytes())?,
    }
    if let Some(path) = &cfg.options.csv {
        outcome.table.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(outcome.report.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fermatlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
