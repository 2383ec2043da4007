//! The JSON record printed by every command, and the exit-code mapping.

use std::process::ExitCode;

use jackmoment::{Error, Param};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    /// Shell-quoted invocation that reproduces this record.
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub convergence: Option<Value>,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub version: &'static str,
}

/// Exact parameters print as "p/q"; decimals stay numbers.
pub fn exact_str(p: &Param) -> Value {
    match p {
        Param::Exact(r) => json!(format!("{}/{}", r.numer(), r.denom())),
        Param::Approx(v) => json!(v),
    }
}

fn shell_quote(s: &str) -> String {
    let plain = !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_./=:+,".contains(c));
    if plain {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

impl Record {
    pub fn new() -> Self {
        let argv: Vec<String> = std::env::args().collect();
        let mut words = vec!["jackmoment".to_string()];
        words.extend(argv.iter().skip(1).map(|a| shell_quote(a)));
        Record {
            command: words.join(" "),
            argv,
            inputs: Map::new(),
            result: Value::Null,
            convergence: None,
            seed: None,
            warnings: Vec::new(),
            error: None,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn input(&mut self, key: &str, p: &Param) -> &mut Self {
        self.inputs.insert(key.into(), exact_str(p));
        self
    }

    pub fn input_raw(&mut self, key: &str, v: Value) -> &mut Self {
        self.inputs.insert(key.into(), v);
        self
    }

    fn print(&self) {
        match serde_json::to_string(self) {
            Ok(s) => println!("{s}"),
            Err(e) => eprintln!("error: cannot serialise output: {e}"),
        }
    }

    pub fn emit(self) -> ExitCode {
        self.print();
        ExitCode::SUCCESS
    }
}

/// A command that ended with a nonzero exit code. The record, when present,
/// carries whatever partial result was computed.
#[derive(Debug)]
pub struct Failure {
    record: Option<Box<Record>>,
    code: u8,
    message: String,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Divergence { .. }
        | Error::InsufficientData(_)
        | Error::QuadratureNonConvergence { .. }
        | Error::Numerical(_) => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            record: None,
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn invalid(rec: Record, msg: &str) -> Self {
        Failure {
            record: Some(Box::new(rec)),
            code: EXIT_INVALID,
            message: msg.to_string(),
        }
    }

    pub fn non_convergence(rec: Record, msg: &str) -> Self {
        Failure {
            record: Some(Box::new(rec)),
            code: EXIT_NUMERICAL,
            message: msg.to_string(),
        }
    }

    pub fn verification(rec: Record) -> Self {
        Failure {
            record: Some(Box::new(rec)),
            code: EXIT_VERIFY,
            message: "verification failed".to_string(),
        }
    }

    /// Prints the record (or `fallback`, which holds the parsed inputs) and
    /// returns the exit code.
    pub fn emit(self, fallback: Record) -> ExitCode {
        let mut rec = self.record.map_or(fallback, |r| *r);
        eprintln!("error: {}", self.message);
        rec.error = Some(self.message);
        rec.print();
        ExitCode::from(self.code)
    }
}
