//! External simulators speaking line-delimited JSON over stdin/stdout.
//!
//! Requests and replies, one JSON object per line:
//!
//! ```text
//! {"op":"info"}                        -> {"n":2,"n_d":1,"safe_set":{"kind":"ball",...}}
//! {"op":"step","x":[..],"d":[..]}      -> {"x_next":[..]}
//! {"op":"sample_d","seed_hint":123}    -> {"d":[..]}
//! ```
//!
//! The info reply may also carry a `"name"`, used as the system name in
//! certificates; otherwise the command line is used.
//! A reply of the form `{"error":"message"}` reports a simulator-side failure.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::{check_dim, Result};
use crate::sets::{SafeSet, SafeSetSpec};

use super::BlackBox;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Error)]
pub enum PluginError {
    #[error("failed to start plugin `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("plugin did not answer `{op}` within {timeout:?}")]
    Timeout { op: &'static str, timeout: Duration },
    #[error("plugin closed its output while handling `{op}`")]
    Closed { op: &'static str },
    #[error("malformed plugin reply to `{op}`: {detail}")]
    Malformed { op: &'static str, detail: String },
    #[error("plugin reported an error for `{op}`: {message}")]
    Remote { op: &'static str, message: String },
    #[error("plugin i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Deserialize, Serialize)]
struct InfoReply {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    n_d: usize,
    safe_set: Option<SafeSetSpec>,
}

#[derive(Debug, Deserialize)]
struct StepReply {
    x_next: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct SampleReply {
    d: Vec<f64>,
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    replies: Receiver<std::io::Result<String>>,
}

/// Client side of the protocol. Requests are serialized through a mutex, so
/// sampling workers share one child process.
pub struct PluginSystem {
    command: String,
    /// Name announced by the plugin, or the command line.
    name: String,
    n: usize,
    n_d: usize,
    set: SafeSet,
    timeout: Duration,
    channel: Mutex<Channel>,
}

impl PluginSystem {
    /// Starts `command` through `sh -c` and queries its dimensions and safe
    /// set. `safe_set` overrides the set announced by the plugin.
    pub fn spawn(command: &str, timeout: Duration, safe_set: Option<SafeSet>) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| PluginError::Spawn {
                command: command.to_string(),
                source,
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let channel = Channel {
            child,
            stdin,
            replies: rx,
        };
        let mut plugin = Self {
            command: command.to_string(),
            name: command.to_string(),
            n: 0,
            n_d: 0,
            set: SafeSet::cube(1, 0.0, 1.0)?,
            timeout,
            channel: Mutex::new(channel),
        };
        let info: InfoReply = plugin.request("info", &json!({"op": "info"}))?;
        let set = match (safe_set, info.safe_set) {
            (Some(s), _) => s,
            (None, Some(spec)) => SafeSet::from_spec(&spec)?,
            (None, None) => {
                return Err(PluginError::Malformed {
                    op: "info",
                    detail: "no safe_set announced and none configured".into(),
                }
                .into())
            }
        };
        check_dim(info.n, set.dim())?;
        if info.n == 0 || info.n_d == 0 {
            return Err(PluginError::Malformed {
                op: "info",
                detail: format!("dimensions must be positive, got n={} n_d={}", info.n, info.n_d),
            }
            .into());
        }
        if let Some(name) = info.name {
            plugin.name = name;
        }
        plugin.n = info.n;
        plugin.n_d = info.n_d;
        plugin.set = set;
        Ok(plugin)
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn request<T: for<'de> Deserialize<'de>>(&self, op: &'static str, msg: &Value) -> Result<T, PluginError> {
        let mut ch = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        let mut line = msg.to_string();
        line.push('\n');
        ch.stdin.write_all(line.as_bytes())?;
        ch.stdin.flush()?;
        let reply = match ch.replies.recv_timeout(self.timeout) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => return Err(e.into()),
            Err(RecvTimeoutError::Timeout) => {
                return Err(PluginError::Timeout {
                    op,
                    timeout: self.timeout,
                })
            }
            Err(RecvTimeoutError::Disconnected) => return Err(PluginError::Closed { op }),
        };
        let value: Value = serde_json::from_str(&reply).map_err(|e| PluginError::Malformed {
            op,
            detail: format!("{e}: {reply:.200}"),
        })?;
        if let Some(message) = value.get("error") {
            return Err(PluginError::Remote {
                op,
                message: message.as_str().map(str::to_string).unwrap_or_else(|| message.to_string()),
            });
        }
        serde_json::from_value(value).map_err(|e| PluginError::Malformed {
            op,
            detail: e.to_string(),
        })
    }
}

impl Drop for PluginSystem {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|p| p.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}

fn expect_len(op: &'static str, v: &[f64], want: usize) -> Result<(), PluginError> {
    if v.len() != want {
        return Err(PluginError::Malformed {
            op,
            detail: format!("expected {want} values, got {}", v.len()),
        });
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(PluginError::Malformed {
            op,
            detail: "non-finite value".into(),
        });
    }
    Ok(())
}

impl BlackBox for PluginSystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn state_dim(&self) -> usize {
        self.n
    }

    fn disturbance_dim(&self) -> usize {
        self.n_d
    }

    fn safe_set(&self) -> &SafeSet {
        &self.set
    }

    fn step(&self, x: &[f64], d: &[f64], next: &mut [f64]) -> Result<()> {
        check_dim(self.n, x.len())?;
        check_dim(self.n_d, d.len())?;
        check_dim(self.n, next.len())?;
        let reply: StepReply = self.request("step", &json!({"op": "step", "x": x, "d": d}))?;
        expect_len("step", &reply.x_next, self.n)?;
        next.copy_from_slice(&reply.x_next);
        Ok(())
    }

    fn sample_d(&self, seed_hint: u64, d: &mut [f64]) -> Result<()> {
        check_dim(self.n_d, d.len())?;
        let reply: SampleReply =
            self.request("sample_d", &json!({"op": "sample_d", "seed_hint": seed_hint}))?;
        expect_len("sample_d", &reply.d, self.n_d)?;
        d.copy_from_slice(&reply.d);
        Ok(())
    }
}

/// Server side of the protocol: answers requests for `sys` until `input`
/// reaches end of file. Bad requests get an `{"error": ...}` reply.
pub fn serve<R: BufRead, W: Write>(sys: &dyn BlackBox, input: R, mut output: W) -> std::io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match handle(sys, &line) {
            Ok(v) => v,
            Err(msg) => json!({ "error": msg }),
        };
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(())
}

fn handle(sys: &dyn BlackBox, line: &str) -> std::result::Result<Value, String> {
    let req: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let floats = |key: &str| -> std::result::Result<Vec<f64>, String> {
        serde_json::from_value(req.get(key).cloned().unwrap_or(Value::Null))
            .map_err(|e| format!("field `{key}`: {e}"))
    };
    match req.get("op").and_then(Value::as_str) {
        Some("info") => Ok(serde_json::to_value(InfoReply {
            name: Some(sys.name().to_string()),
            n: sys.state_dim(),
            n_d: sys.disturbance_dim(),
            safe_set: sys.safe_set().to_spec(),
        })
        .map_err(|e| e.to_string())?),
        Some("step") => {
            let x = floats("x")?;
            let d = floats("d")?;
            let mut next = vec![0.0; sys.state_dim()];
            sys.step(&x, &d, &mut next).map_err(|e| e.to_string())?;
            Ok(json!({ "x_next": next }))
        }
        Some("sample_d") => {
            let hint = req
                .get("seed_hint")
                .and_then(Value::as_u64)
                .ok_or("field `seed_hint` must be an unsigned 64-bit integer")?;
            let mut d = vec![0.0; sys.disturbance_dim()];
            sys.sample_d(hint, &mut d).map_err(|e| e.to_string())?;
            Ok(json!({ "d": d }))
        }
        Some(op) => Err(format!("unknown op `{op}`")),
        None => Err("missing `op`".into()),
    }
}
