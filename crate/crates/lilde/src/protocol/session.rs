//! Subprocess evaluator sessions.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use crate::error::{EvalError, ProtocolError};
use crate::objective::{EvalContext, Objective};
use crate::protocol::{encode_request, parse_response, EvalRequest, EvalResponse};

/// How to start and talk to one evaluator process.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// Argv of the evaluator, program first.
    pub command: Vec<String>,
    /// Dimension announced in the INIT handshake.
    pub dimension: usize,
    /// Per-request timeout. Lab cycle times are seconds, so the default
    /// is a generous 60 s.
    pub timeout: Duration,
}

impl SessionConfig {
    pub fn new<S: Into<String>>(command: impl IntoIterator<Item = S>, dimension: usize) -> Self {
        Self {
            command: command.into_iter().map(Into::into).collect(),
            dimension,
            timeout: Duration::from_secs(60),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

/// One evaluator process with exactly one outstanding request at a time.
///
/// A reader thread owns the child's stdout so every wait can honor the
/// timeout. A session that times out or loses its process is dead; all
/// further requests fail fast.
pub struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    next_id: u64,
    timeout: Duration,
    dead: bool,
}

impl Session {
    /// Spawns the evaluator and performs the `INIT <d>` / `READY`
    /// handshake.
    pub fn spawn(config: &SessionConfig) -> Result<Self, EvalError> {
        let (program, args) = config
            .command
            .split_first()
            .ok_or_else(|| EvalError::Domain("empty evaluator command".to_string()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(err) => {
                        let _ = tx.send(Err(err));
                        break;
                    }
                }
            }
        });
        let mut session = Self {
            child,
            stdin,
            lines: rx,
            next_id: 0,
            timeout: config.timeout,
            dead: false,
        };
        session.send_line(&format!("INIT {}\n", config.dimension))?;
        let line = session.wait_line()?;
        if line.trim_end() != "READY" {
            session.dead = true;
            return Err(ProtocolError::BadHandshake {
                line: line.trim_end().to_string(),
            }
            .into());
        }
        Ok(session)
    }

    /// Measures one point. A `FAULT` reply is treated as transient and
    /// retried once with a fresh request id; a second fault, a timeout, a
    /// malformed line, or a dead process is surfaced as the error.
    pub fn evaluate_point(&mut self, point: &[f64]) -> Result<f64, EvalError> {
        match self.request(point) {
            Err(EvalError::Fault(_)) => self.request(point),
            other => other,
        }
    }

    fn request(&mut self, point: &[f64]) -> Result<f64, EvalError> {
        if self.dead {
            return Err(EvalError::ProcessExited);
        }
        let id = self.next_id;
        self.next_id += 1;
        let line = encode_request(&EvalRequest {
            id,
            point: point.to_vec(),
        })?;
        self.send_line(&line)?;
        let reply = self.wait_line()?;
        let response = parse_response(&reply).map_err(|err| {
            self.dead = true;
            err
        })?;
        if response.id() != id {
            self.dead = true;
            return Err(ProtocolError::IdMismatch {
                expected: id,
                got: response.id(),
            }
            .into());
        }
        match response {
            EvalResponse::Value { value, .. } => Ok(value),
            EvalResponse::Fault { message, .. } => Err(EvalError::Fault(message)),
        }
    }

    fn send_line(&mut self, line: &str) -> Result<(), EvalError> {
        if let Err(err) = self.stdin.write_all(line.as_bytes()).and_then(|_| self.stdin.flush()) {
            self.dead = true;
            return Err(EvalError::Io(err));
        }
        Ok(())
    }

    fn wait_line(&mut self) -> Result<String, EvalError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(err)) => {
                self.dead = true;
                Err(EvalError::Io(err))
            }
            Err(RecvTimeoutError::Timeout) => {
                self.dead = true;
                Err(EvalError::Timeout(self.timeout))
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.dead = true;
                Err(EvalError::ProcessExited)
            }
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        // Polite shutdown, then force.
        let _ = self.stdin.write_all(b"SHUTDOWN\n");
        let _ = self.stdin.flush();
        for _ in 0..20 {
            match self.child.try_wait() {
                Ok(Some(_)) => return,
                Ok(None) => thread::sleep(Duration::from_millis(5)),
                Err(_) => break,
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A single session as an [`Objective`]. Serial by contract: the engine
/// will not evaluate it concurrently.
pub struct ExternalObjective {
    session: Mutex<Session>,
    dimension: usize,
}

impl ExternalObjective {
    pub fn spawn(config: &SessionConfig) -> Result<Self, EvalError> {
        Ok(Self {
            session: Mutex::new(Session::spawn(config)?),
            dimension: config.dimension,
        })
    }
}

impl Objective for ExternalObjective {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64], _ctx: &mut EvalContext) -> Result<f64, EvalError> {
        self.session
            .lock()
            .expect("session lock poisoned")
            .evaluate_point(x)
    }

    fn parallel_safe(&self) -> bool {
        false
    }
}

/// Several sessions running the same evaluator command; evaluation `i`
/// goes to session `i mod pool size`, so each session still sees strictly
/// increasing ids and one request at a time while the pool as a whole
/// serves concurrent callers.
pub struct SessionPool {
    sessions: Vec<Mutex<Session>>,
    dimension: usize,
}

impl SessionPool {
    pub fn spawn(config: &SessionConfig, size: usize) -> Result<Self, EvalError> {
        assert!(size >= 1, "a pool needs at least one session");
        let sessions = (0..size)
            .map(|_| Session::spawn(config).map(Mutex::new))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            sessions,
            dimension: config.dimension,
        })
    }

    pub fn size(&self) -> usize {
        self.sessions.len()
    }
}

impl Objective for SessionPool {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, x: &[f64], ctx: &mut EvalContext) -> Result<f64, EvalError> {
        let slot = (ctx.index % self.sessions.len() as u64) as usize;
        self.sessions[slot]
            .lock()
            .expect("session lock poisoned")
            .evaluate_point(x)
    }

    fn parallel_safe(&self) -> bool {
        true
    }
}
