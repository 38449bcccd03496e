//! Client side of the foundation-model sidecar protocol.
//!
//! The sidecar speaks line-delimited JSON: one request object per
//! LF-terminated line in, one response object per line out, in request
//! order. The same framing is used over a child process's stdio and over
//! TCP.
//!
//! ```text
//! -> {"id":1,"op":"ping"}
//! <- {"id":1,"ok":true,"model":"google/timesfm-1.0-200m"}
//! -> {"id":2,"op":"forecast","series":[1.0,2.0,3.0],"horizon":2,"freq":0}
//! <- {"id":2,"ok":true,"forecast":[2.0,2.0]}
//! ```
//!
//! [`serve_stub`] is an in-crate implementation of the sidecar's stub mode,
//! so the full forecasting pipeline (including process spawning) can be
//! exercised without the real model.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::TcpStream;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Checkpoint the real sidecar loads unless told otherwise.
pub const DEFAULT_CHECKPOINT: &str = "google/timesfm-1.0-200m";
/// Model identifier reported by the stub on `ping`.
pub const STUB_MODEL_ID: &str = "stub";
/// Number of trailing values the stub averages.
pub const STUB_WINDOW: usize = 8;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("failed to start sidecar `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("sidecar i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("sidecar protocol violation: {0}")]
    Protocol(String),
    #[error("sidecar reported an error: {0}")]
    Remote(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BridgeOp {
    Ping,
    Forecast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeRequest {
    pub id: i64,
    pub op: BridgeOp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<u8>,
}

impl BridgeRequest {
    pub fn ping(id: i64) -> Self {
        Self {
            id,
            op: BridgeOp::Ping,
            series: None,
            horizon: None,
            freq: None,
        }
    }

    pub fn forecast(id: i64, series: Vec<f64>, horizon: usize, freq: u8) -> Self {
        Self {
            id,
            op: BridgeOp::Forecast,
            series: Some(series),
            horizon: Some(horizon),
            freq: Some(freq),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeResponse {
    pub id: i64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forecast: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl BridgeResponse {
    fn failure(id: i64, message: impl Into<String>) -> Self {
        Self {
            id,
            ok: false,
            forecast: None,
            error: Some(message.into()),
            model: None,
        }
    }
}

/// Anything that can produce a zero-shot point forecast.
pub trait FmBackend {
    fn model_id(&mut self) -> Result<String, BridgeError>;
    fn forecast(&mut self, series: &[f64], horizon: usize, freq: u8)
        -> Result<Vec<f64>, BridgeError>;
}

/// The stub rule: mean of the last `min(8, len)` values, repeated.
pub fn stub_forecast(series: &[f64], horizon: usize) -> Vec<f64> {
    let window = &series[series.len().saturating_sub(STUB_WINDOW)..];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    vec![mean; horizon]
}

/// In-process backend applying [`stub_forecast`]; no I/O.
#[derive(Debug, Default, Clone)]
pub struct StubBackend;

impl FmBackend for StubBackend {
    fn model_id(&mut self) -> Result<String, BridgeError> {
        Ok(STUB_MODEL_ID.to_string())
    }

    fn forecast(
        &mut self,
        series: &[f64],
        horizon: usize,
        _freq: u8,
    ) -> Result<Vec<f64>, BridgeError> {
        if series.is_empty() || horizon == 0 {
            return Err(BridgeError::Remote(
                "forecast needs a non-empty series and horizon >= 1".into(),
            ));
        }
        Ok(stub_forecast(series, horizon))
    }
}

/// Answers one raw request line the way the stub sidecar does.
pub fn stub_respond(line: &str) -> BridgeResponse {
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return BridgeResponse::failure(-1, format!("malformed request: {e}")),
    };
    let id = value.get("id").and_then(Value::as_i64).unwrap_or(-1);
    let request: BridgeRequest = match serde_json::from_value(value) {
        Ok(r) => r,
        Err(e) => return BridgeResponse::failure(id, format!("invalid request: {e}")),
    };
    match request.op {
        BridgeOp::Ping => BridgeResponse {
            id,
            ok: true,
            forecast: None,
            error: None,
            model: Some(STUB_MODEL_ID.to_string()),
        },
        BridgeOp::Forecast => {
            let series = request.series.unwrap_or_default();
            let horizon = request.horizon.unwrap_or(0);
            if request.freq.is_some_and(|f| f > 1) {
                return BridgeResponse::failure(id, "freq must be 0 or 1");
            }
            match StubBackend.forecast(&series, horizon, request.freq.unwrap_or(0)) {
                Ok(forecast) => BridgeResponse {
                    id,
                    ok: true,
                    forecast: Some(forecast),
                    error: None,
                    model: None,
                },
                Err(e) => BridgeResponse::failure(id, e.to_string()),
            }
        }
    }
}

/// Runs the stub request loop until `input` is exhausted.
pub fn serve_stub<R: BufRead, W: Write>(input: R, mut output: W) -> std::io::Result<()> {
    for line in input.lines() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let response = stub_respond(line);
        serde_json::to_writer(&mut output, &response)?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(())
}

/// Request/response over any line-oriented byte stream pair. One request is
/// in flight at a time.
pub struct LineClient<R, W> {
    reader: R,
    writer: W,
    next_id: i64,
}

impl<R: BufRead, W: Write> LineClient<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader,
            writer,
            next_id: 1,
        }
    }

    pub fn call(&mut self, mut request: BridgeRequest) -> Result<BridgeResponse, BridgeError> {
        request.id = self.next_id;
        self.next_id += 1;
        let mut line = serde_json::to_string(&request)
            .map_err(|e| BridgeError::Protocol(e.to_string()))?;
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()?;

        let mut reply = String::new();
        if self.reader.read_line(&mut reply)? == 0 {
            return Err(BridgeError::Protocol("sidecar closed its output".into()));
        }
        let response: BridgeResponse = serde_json::from_str(reply.trim_end())
            .map_err(|e| BridgeError::Protocol(format!("bad response line: {e}")))?;
        if response.id != request.id {
            return Err(BridgeError::Protocol(format!(
                "response id {} does not match request id {}",
                response.id, request.id
            )));
        }
        if !response.ok {
            return Err(BridgeError::Remote(
                response.error.unwrap_or_else(|| "unspecified error".into()),
            ));
        }
        Ok(response)
    }
}

impl<R: BufRead, W: Write> FmBackend for LineClient<R, W> {
    fn model_id(&mut self) -> Result<String, BridgeError> {
        let response = self.call(BridgeRequest::ping(0))?;
        response
            .model
            .ok_or_else(|| BridgeError::Protocol("ping response without model".into()))
    }

    fn forecast(
        &mut self,
        series: &[f64],
        horizon: usize,
        freq: u8,
    ) -> Result<Vec<f64>, BridgeError> {
        let response = self.call(BridgeRequest::forecast(0, series.to_vec(), horizon, freq))?;
        let forecast = response
            .forecast
            .ok_or_else(|| BridgeError::Protocol("forecast response without values".into()))?;
        if forecast.len() != horizon {
            return Err(BridgeError::Protocol(format!(
                "expected {horizon} forecast values, got {}",
                forecast.len()
            )));
        }
        Ok(forecast)
    }
}

/// A sidecar running as a child process, spoken to over its stdio.
pub struct ProcessBackend {
    client: Option<LineClient<BufReader<ChildStdout>, BufWriter<ChildStdin>>>,
    child: Child,
}

impl ProcessBackend {
    /// Spawns `program args...`. The sidecar's stderr is inherited.
    pub fn spawn<S: AsRef<str>>(program: &str, args: &[S]) -> Result<Self, BridgeError> {
        let describe = || {
            std::iter::once(program)
                .chain(args.iter().map(AsRef::as_ref))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut child = Command::new(program)
            .args(args.iter().map(AsRef::as_ref))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| BridgeError::Spawn {
                command: describe(),
                source,
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        Ok(Self {
            client: Some(LineClient::new(
                BufReader::new(stdout),
                BufWriter::new(stdin),
            )),
            child,
        })
    }

    /// Splits a command line on whitespace and spawns it. No shell quoting.
    pub fn spawn_command_line(command_line: &str) -> Result<Self, BridgeError> {
        let mut parts = command_line.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| BridgeError::Protocol("empty sidecar command".into()))?;
        let args: Vec<&str> = parts.collect();
        Self::spawn(program, &args)
    }
}

impl ProcessBackend {
    fn client(
        &mut self,
    ) -> &mut LineClient<BufReader<ChildStdout>, BufWriter<ChildStdin>> {
        self.client.as_mut().expect("client lives until drop")
    }
}

impl FmBackend for ProcessBackend {
    fn model_id(&mut self) -> Result<String, BridgeError> {
        self.client().model_id()
    }

    fn forecast(
        &mut self,
        series: &[f64],
        horizon: usize,
        freq: u8,
    ) -> Result<Vec<f64>, BridgeError> {
        self.client().forecast(series, horizon, freq)
    }
}

impl Drop for ProcessBackend {
    fn drop(&mut self) {
        // Closing stdin ends the sidecar's request loop.
        drop(self.client.take());
        for _ in 0..50 {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            std::thread::sleep(std::time::Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A sidecar listening on a TCP address with the same line framing.
pub struct TcpBackend {
    client: LineClient<BufReader<TcpStream>, BufWriter<TcpStream>>,
}

impl TcpBackend {
    pub fn connect(addr: &str) -> Result<Self, BridgeError> {
        let stream = TcpStream::connect(addr)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(Self {
            client: LineClient::new(reader, BufWriter::new(stream)),
        })
    }
}

impl FmBackend for TcpBackend {
    fn model_id(&mut self) -> Result<String, BridgeError> {
        self.client.model_id()
    }

    fn forecast(
        &mut self,
        series: &[f64],
        horizon: usize,
        freq: u8,
    ) -> Result<Vec<f64>, BridgeError> {
        self.client.forecast(series, horizon, freq)
    }
}
