//! Batch front-end for `iwasawa-core`: job files in, reports out.

pub mod commands;
pub mod job;
pub mod report;

use std::path::Path;

use commands::Options;
use job::Job;
use report::{Report, Status};

/// Reads and runs one job file; I/O and parse problems become input-error
/// reports.
pub fn run_file(command: &str, path: &Path, options: &Options) -> Report {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return Report::failure(
                command,
                Status::InputError,
                "IoError",
                format!("{}: {e}", path.display()),
            )
        }
    };
    match Job::parse(&text) {
        Ok(job) => commands::run(command, &job, options),
        Err(e) => Report::failure(command, Status::InputError, "ParseError", e.to_string()),
    }
}
