//! JSON-lines protocol traces.
//!
//! A trace file is one header line `{"protocol":…,"seed":…}` followed by one
//! line per event: `{"step":…,"actor":…,"action":…,"payload":…}`. Steps start
//! at 1 and increase by one. The last event has action `"verdict"` and its
//! payload carries a `"verdict"` object.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::message::Message2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Teleport,
    Superdense,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Teleport => "teleport",
            Protocol::Superdense => "superdense",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "teleport" => Ok(Protocol::Teleport),
            "superdense" => Ok(Protocol::Superdense),
            other => Err(Error::Validation(format!("unknown protocol {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    System,
    Alice,
    Bob,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: u64,
    pub actor: Actor,
    pub action: String,
    pub payload: Value,
}

/// Final outcome of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    /// |⟨u|bob⟩|² after teleportation.
    Fidelity { value: f64 },
    /// Message Bob decoded in superdense coding.
    Decoded { message: Message2 },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Fidelity { value } => write!(f, "fidelity={value:.12}"),
            Verdict::Decoded { message } => write!(f, "decoded={message}"),
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Protocol(format!("malformed verdict {s:?}"));
        let (kind, value) = s.split_once('=').ok_or_else(bad)?;
        match kind {
            "fidelity" => Ok(Verdict::Fidelity {
                value: value.parse().map_err(|_| bad())?,
            }),
            "decoded" => Ok(Verdict::Decoded {
                message: value.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    protocol: Protocol,
    seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolTrace {
    protocol: Protocol,
    seed: Option<u64>,
    events: Vec<TraceEvent>,
    verdict: Option<Verdict>,
}

impl ProtocolTrace {
    pub fn new(protocol: Protocol, seed: Option<u64>) -> Self {
        Self {
            protocol,
            seed,
            events: Vec::new(),
            verdict: None,
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }

    pub fn is_finalized(&self) -> bool {
        self.verdict.is_some()
    }

    /// Appends an event and returns its step number.
    pub fn record(&mut self, actor: Actor, action: &str, payload: Value) -> Result<u64> {
        if self.verdict.is_some() {
            return Err(Error::Protocol(format!(
                "event {action:?} recorded after the verdict"
            )));
        }
        let step = self.events.len() as u64 + 1;
        self.events.push(TraceEvent {
            step,
            actor,
            action: action.to_string(),
            payload,
        });
        Ok(step)
    }

    /// Records the closing `"verdict"` event. `payload` must be an object; the
    /// verdict is inserted under the `"verdict"` key.
    pub fn finalize(&mut self, actor: Actor, verdict: Verdict, mut payload: Value) -> Result<()> {
        let obj = payload
            .as_object_mut()
            .ok_or_else(|| Error::Protocol("verdict payload must be a JSON object".into()))?;
        obj.insert("verdict".into(), json!(verdict));
        self.record(actor, "verdict", payload)?;
        self.verdict = Some(verdict);
        Ok(())
    }

    pub fn to_jsonl(&self) -> Result<String> {
        if self.verdict.is_none() {
            return Err(Error::Protocol("trace has no verdict yet".into()));
        }
        let mut out = serde_json::to_string(&Header {
            protocol: self.protocol,
            seed: self.seed,
        })
        .expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let bad = |line: usize, e: serde_json::Error| Error::Protocol(format!("trace line {line}: {e}"));
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::Protocol("empty trace".into()))?;
        let header: Header = serde_json::from_str(first).map_err(|e| bad(1, e))?;
        let mut trace = Self::new(header.protocol, header.seed);
        for (i, line) in lines {
            let e: TraceEvent = serde_json::from_str(line).map_err(|e| bad(i + 1, e))?;
            if e.step != trace.events.len() as u64 + 1 {
                return Err(Error::Protocol(format!(
                    "trace line {}: step {} out of sequence",
                    i + 1,
                    e.step
                )));
            }
            trace.events.push(e);
        }
        let last = trace
            .events
            .last()
            .ok_or_else(|| Error::Protocol("trace has no events".into()))?;
        if last.action != "verdict" {
            return Err(Error::Protocol("trace does not end with a verdict".into()));
        }
        let v = last
            .payload
            .get("verdict")
            .cloned()
            .ok_or_else(|| Error::Protocol("verdict event lacks a verdict".into()))?;
        trace.verdict = Some(serde_json::from_value(v).map_err(|e| bad(trace.events.len() + 1, e))?);
        Ok(trace)
    }
}

/// Where [`emit_trace`] writes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

pub fn emit_trace(trace: &ProtocolTrace, sink: &Sink) -> Result<()> {
    let text = trace.to_jsonl()?;
    match sink {
        Sink::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        Sink::File(path) => {
            let with_path = |source| Error::Sink {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(with_path)?);
            w.write_all(text.as_bytes()).map_err(with_path)?;
            w.flush().map_err(with_path)?;
        }
    }
    Ok(())
}
