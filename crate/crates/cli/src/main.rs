use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use iwasawa_cli::commands::{Options, COMMANDS};
use iwasawa_cli::run_file;

/// Characteristic ideals, structure invariants and tower descent for
/// finitely presented Iwasawa modules.
#[derive(Parser)]
#[command(name = "iwasawa", version)]
struct Cli {
    /// One of: char, prep, fit0, snf, decompose, pseudonull, tower-check,
    /// tower-char, pro-char, fixed-part, demo-noncomplete, oracle-card,
    /// cross-validate.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    /// Job file (line format or JSON).
    job: PathBuf,
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
    /// Compute tower levels and oracle enumerations concurrently.
    #[arg(long)]
    parallel: bool,
    /// Replace the job's precision, as `N,D`.
    #[arg(long, value_parser = parse_override)]
    precision_override: Option<(u32, u32)>,
    /// Oracle budget in bytes of membership bitmap (8 elements per byte).
    #[arg(long)]
    cap: Option<u64>,
}

fn parse_override(s: &str) -> Result<(u32, u32), String> {
    let (n, d) = s.split_once(',').ok_or("expected N,D")?;
    let n = n.trim().parse().map_err(|_| format!("bad N '{n}'"))?;
    let d = d.trim().parse().map_err(|_| format!("bad D '{d}'"))?;
    Ok((n, d))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let options = Options {
        parallel: cli.parallel,
        precision_override: cli.precision_override,
        cap: cli.cap,
    };
    let report = run_file(&cli.command, &cli.job, &options);
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(report.exit_code as u8)
}
