//! Reports: a human-readable list of lines plus a JSON document carrying
//! the same content. JSON objects use sorted keys, so re-serialising a
//! parsed report reproduces it byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use iwasawa_core::Error;

pub const FORMAT: &str = "iwasawa-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    VerdictFailure,
    InputError,
    PrecisionExhausted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerdictFailure => 1,
            Status::InputError => 2,
            Status::PrecisionExhausted => 3,
        }
    }

    /// Classifies an algebra error.
    pub fn of_error(e: &Error) -> Status {
        if e.is_precision() {
            return Status::PrecisionExhausted;
        }
        match e {
            Error::DescentViolation { .. } | Error::CertificateFailed { .. } | Error::Mismatch { .. } => {
                Status::VerdictFailure
            }
            _ => Status::InputError,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub result: Value,
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str, status: Status, result: Value, lines: Vec<String>) -> Self {
        Report {
            format: FORMAT.to_string(),
            command: command.to_string(),
            status,
            exit_code: status.exit_code(),
            error: None,
            result,
            lines,
        }
    }

    pub fn failure(command: &str, status: Status, name: &str, message: String) -> Self {
        let mut r = Report::new(command, status, Value::Null, vec![format!("error: {message}")]);
        r.error = Some(ErrorInfo {
            name: name.to_string(),
            message,
        });
        r
    }

    pub fn from_error(command: &str, e: &Error) -> Self {
        Report::failure(command, Status::of_error(e), e.name(), e.to_string())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out += l;
            out.push('\n');
        }
        out
    }
}
