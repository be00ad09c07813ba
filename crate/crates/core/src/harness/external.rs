//! Objectives evaluated by an external process.
//!
//! The command is spawned directly (no shell) with `{trial}` in any argument
//! replaced by the trial index. It receives one JSON line on stdin,
//! `{"params": {...}, "trial": i}`, and must print the objective value as the
//! last non-empty line of stdout.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{EvalError, FailurePolicy, Objective};
use crate::space::TrialConfig;

const POLL: Duration = Duration::from_millis(2);

fn default_timeout() -> f64 {
    60.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalObjectiveSpec {
    /// Program followed by its arguments.
    pub command: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
}

impl ExternalObjectiveSpec {
    pub fn new(command: &[&str]) -> Self {
        Self {
            command: command.iter().map(|s| s.to_string()).collect(),
            timeout_secs: default_timeout(),
            failure_policy: FailurePolicy::Record,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_empty() || self.command[0].is_empty() {
            return Err(Error::Config("external objective needs a command".into()));
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(Error::Config(format!(
                "timeout must be a positive number of seconds, got {}",
                self.timeout_secs
            )));
        }
        Ok(())
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }
}

/// Parses the value line of an objective's stdout.
pub fn parse_output(stdout: &str) -> std::result::Result<f64, EvalError> {
    let line = stdout
        .lines()
        .map(str::trim)
        .rfind(|l| !l.is_empty())
        .ok_or_else(|| EvalError::Protocol("no output".into()))?;
    let y: f64 = line
        .parse()
        .map_err(|_| EvalError::Protocol(format!("last output line {line:?} is not a number")))?;
    if y.is_finite() {
        Ok(y)
    } else {
        Err(EvalError::NonFinite(y))
    }
}

/// Runs the command once for `config`.
pub fn evaluate_external(
    spec: &ExternalObjectiveSpec,
    config: &TrialConfig,
    trial: usize,
) -> std::result::Result<f64, EvalError> {
    let argv: Vec<String> = spec
        .command
        .iter()
        .map(|a| a.replace("{trial}", &trial.to_string()))
        .collect();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| EvalError::Other(format!("cannot start {:?}: {e}", argv[0])))?;

    let payload = serde_json::json!({ "params": config, "trial": trial });
    let mut stdin = child.stdin.take().expect("stdin is piped");
    // programs that ignore stdin may exit before reading it
    let _ = writeln!(stdin, "{payload}");
    drop(stdin);

    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let deadline = Instant::now() + spec.timeout();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(EvalError::Timeout(spec.timeout()));
            }
            Ok(None) => thread::sleep(POLL),
            Err(e) => return Err(EvalError::Other(format!("wait failed: {e}"))),
        }
    };
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    if !status.success() {
        let tail = String::from_utf8_lossy(&stderr);
        let tail = tail.trim();
        let reason = if tail.is_empty() {
            status.to_string()
        } else {
            format!("{status}: {}", tail.lines().last().unwrap_or_default())
        };
        return Err(EvalError::ExitStatus(reason));
    }
    parse_output(&String::from_utf8_lossy(&stdout))
}

/// [`Objective`] adapter for an external command.
#[derive(Debug, Clone)]
pub struct ExternalObjective {
    pub spec: ExternalObjectiveSpec,
}

impl Objective for ExternalObjective {
    fn evaluate(&self, config: &TrialConfig, trial: usize) -> std::result::Result<f64, EvalError> {
        evaluate_external(&self.spec, config, trial)
    }
}
