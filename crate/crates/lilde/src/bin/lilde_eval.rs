//! Reference external evaluator speaking the line protocol on
//! stdin/stdout. Computes the maximization-form Ackley value, and can
//! misbehave on demand to exercise the optimizer's error paths.
//!
//! ```text
//! lilde-eval [--fault-every K] [--garbage] [--sleep-ms N]
//! ```
//!
//! `--fault-every K` replies `FAULT` to every request whose id is a
//! positive multiple of K (K=1 faults every request), `--garbage` answers
//! evaluations with a line that is not part of the protocol, and
//! `--sleep-ms N` stalls before each reply.

use std::io::{self, BufRead, Write};
use std::process::exit;
use std::thread;
use std::time::Duration;

use lilde::objectives::ackley_value;
use lilde::protocol::{encode_response, parse_request, EvalResponse};

struct Options {
    fault_every: Option<u64>,
    garbage: bool,
    sleep: Option<Duration>,
}

fn parse_args() -> Options {
    let mut options = Options {
        fault_every: None,
        garbage: false,
        sleep: None,
    };
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--fault-every" => {
                let k = args
                    .next()
                    .and_then(|v| v.parse::<u64>().ok())
                    .unwrap_or_else(|| usage("--fault-every needs a positive integer"));
                if k == 0 {
                    usage("--fault-every needs a positive integer");
                }
                options.fault_every = Some(k);
            }
            "--garbage" => options.garbage = true,
            "--sleep-ms" => {
                let ms = args
                    .next()
                    .and_then(|v| v.parse::<u64>().ok())
                    .unwrap_or_else(|| usage("--sleep-ms needs an integer"));
                options.sleep = Some(Duration::from_millis(ms));
            }
            other => usage(&format!("unknown argument {other:?}")),
        }
    }
    options
}

fn usage(message: &str) -> ! {
    eprintln!("lilde-eval: {message}");
    eprintln!("usage: lilde-eval [--fault-every K] [--garbage] [--sleep-ms N]");
    exit(64);
}

fn main() {
    let options = parse_args();
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut dimension: Option<usize> = None;

    for line in stdin.lock().lines() {
        let line = match line {
            Ok(line) => line,
            Err(_) => break,
        };
        let trimmed = line.trim_end();
        if let Some(rest) = trimmed.strip_prefix("INIT ") {
            match rest.parse::<usize>() {
                Ok(d) if d >= 1 => {
                    dimension = Some(d);
                    let _ = out.write_all(b"READY\n").and_then(|_| out.flush());
                }
                _ => {
                    eprintln!("lilde-eval: bad INIT line {trimmed:?}");
                    exit(65);
                }
            }
            continue;
        }
        if trimmed == "SHUTDOWN" {
            break;
        }
        let request = match parse_request(trimmed) {
            Ok(request) => request,
            Err(err) => {
                eprintln!("lilde-eval: {err}");
                exit(65);
            }
        };
        if let Some(pause) = options.sleep {
            thread::sleep(pause);
        }
        if options.garbage {
            let _ = out.write_all(b"NONSENSE\n").and_then(|_| out.flush());
            continue;
        }
        // Ids are 0-based: with --fault-every K, request number K, 2K, ...
        // (ids K-1, 2K-1, ...) fault; K=1 faults every request.
        let response = match options.fault_every {
            Some(k) if (request.id + 1) % k == 0 => EvalResponse::Fault {
                id: request.id,
                message: "detector saturated".to_string(),
            },
            _ => {
                if dimension.is_some_and(|d| d != request.point.len()) {
                    EvalResponse::Fault {
                        id: request.id,
                        message: "dimension mismatch".to_string(),
                    }
                } else {
                    EvalResponse::Value {
                        id: request.id,
                        value: ackley_value(&request.point),
                    }
                }
            }
        };
        let _ = out
            .write_all(encode_response(&response).as_bytes())
            .and_then(|_| out.flush());
    }
}
