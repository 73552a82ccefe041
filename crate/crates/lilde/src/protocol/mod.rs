//! Line protocol for external objective evaluators.
//!
//! The optimizer talks to an evaluator process over its standard streams,
//! one UTF-8 line per message, `\n` terminated:
//!
//! ```text
//! optimizer -> evaluator     INIT <d>
//! evaluator -> optimizer     READY
//! optimizer -> evaluator     EVAL <id> <x_0> <x_1> ... <x_{d-1}>
//! evaluator -> optimizer     RESULT <id> <value>
//!                        or  FAULT <id> <message...>
//! optimizer -> evaluator     SHUTDOWN
//! ```
//!
//! Numbers are plain or scientific decimal, written so that parsing
//! recovers the exact double (Rust's shortest round-trip formatting).
//! Request ids increase strictly within a session and exactly one request
//! is outstanding at a time; concurrency is achieved by running several
//! sessions (see [`SessionPool`]).

mod session;

pub use session::{ExternalObjective, Session, SessionConfig, SessionPool};

use crate::error::ProtocolError;

/// One evaluation request: a session-unique id and the point to measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRequest {
    pub id: u64,
    pub point: Vec<f64>,
}

/// The evaluator's reply to one request.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalResponse {
    Value { id: u64, value: f64 },
    Fault { id: u64, message: String },
}

impl EvalResponse {
    pub fn id(&self) -> u64 {
        match *self {
            EvalResponse::Value { id, .. } | EvalResponse::Fault { id, .. } => id,
        }
    }
}

/// Encodes `EVAL <id> <x...>`, newline terminated. Rejects empty vectors
/// and non-finite components; the wire carries finite doubles only.
pub fn encode_request(request: &EvalRequest) -> Result<String, ProtocolError> {
    if request.point.is_empty() {
        return Err(ProtocolError::EmptyVector);
    }
    if let Some((index, _)) = request
        .point
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite())
    {
        return Err(ProtocolError::NonFiniteComponent { index });
    }
    let mut line = format!("EVAL {}", request.id);
    for component in &request.point {
        line.push(' ');
        line.push_str(&component.to_string());
    }
    line.push('\n');
    Ok(line)
}

/// Parses an `EVAL` line (the evaluator side of the wire).
pub fn parse_request(line: &str) -> Result<EvalRequest, ProtocolError> {
    let malformed = || ProtocolError::Malformed {
        line: line.trim_end().to_string(),
    };
    let mut tokens = line.trim_end_matches(['\n', '\r']).split(' ');
    if tokens.next() != Some("EVAL") {
        return Err(malformed());
    }
    let id = tokens
        .next()
        .and_then(|t| t.parse::<u64>().ok())
        .ok_or_else(malformed)?;
    let point = tokens
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(malformed()),
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if point.is_empty() {
        return Err(malformed());
    }
    Ok(EvalRequest { id, point })
}

/// Parses a `RESULT` or `FAULT` line. Anything else is a protocol error
/// carrying the offending line.
pub fn parse_response(line: &str) -> Result<EvalResponse, ProtocolError> {
    let trimmed = line.trim_end_matches(['\n', '\r']);
    let malformed = || ProtocolError::Malformed {
        line: trimmed.to_string(),
    };
    match trimmed.split_once(' ') {
        Some(("RESULT", rest)) => {
            let (id, value) = rest.split_once(' ').ok_or_else(malformed)?;
            let id = id.parse::<u64>().map_err(|_| malformed())?;
            let value = value.parse::<f64>().map_err(|_| malformed())?;
            Ok(EvalResponse::Value { id, value })
        }
        Some(("FAULT", rest)) => {
            let (id, message) = rest.split_once(' ').unwrap_or((rest, ""));
            let id = id.parse::<u64>().map_err(|_| malformed())?;
            Ok(EvalResponse::Fault {
                id,
                message: message.to_string(),
            })
        }
        _ => Err(malformed()),
    }
}

/// Encodes the evaluator's reply line, newline terminated.
pub fn encode_response(response: &EvalResponse) -> String {
    match response {
        EvalResponse::Value { id, value } => format!("RESULT {id} {value}\n"),
        EvalResponse::Fault { id, message } => format!("FAULT {id} {message}\n"),
    }
}
