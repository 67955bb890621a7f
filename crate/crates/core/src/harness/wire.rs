//! Two-process demo over a line-based TCP protocol.
//!
//! Bob listens, Alice connects. Every line is ASCII and newline-terminated:
//!
//! ```text
//! alice → bob   HELLO v1 <seed>
//! bob → alice   OK <protocol>              (or ERR <reason>, then close)
//! alice → bob   CC <b1><b0>                 teleport: the two outcome bits
//! alice → bob   QUBIT-SENT <unitary>        superdense: marks the qubit handoff
//! bob → alice   DONE <verdict>
//! ```
//!
//! No amplitudes cross the wire. Both sides rebuild the global state
//! themselves: for teleportation Bob prepares U ⊗ Φ⁺ from the shared input
//! and projects onto the branch named by the received bits; for superdense
//! coding he applies the marked local operation to his copy of Φ⁺, standing
//! in for the arriving qubit, and decodes by Bell measurement.

use std::fmt;
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::str::FromStr;
use std::thread;
use std::time::{Duration, Instant};

use super::trace::{Protocol, Verdict};
use crate::error::{Error, Result};
use crate::message::Message2;
use crate::phase_space::BellState;
use crate::statevec::{apply_1q, measure_forced, tensor};
use crate::superdense::{self, encoding_table};
use crate::teleport::{self, bell_projectors_ua, bob_state, correction_for, fidelity, BellOutcome, InputQubit};

pub const PROTOCOL_VERSION: &str = "v1";

const IO_TIMEOUT: Duration = Duration::from_secs(10);
const CONNECT_PATIENCE: Duration = Duration::from_secs(5);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alice" => Ok(Role::Alice),
            "bob" => Ok(Role::Bob),
            other => Err(Error::Validation(format!("unknown role {other:?}; expected alice|bob"))),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Alice => "alice",
            Role::Bob => "bob",
        })
    }
}

/// Protocol parameters. Bob needs the teleport input to mirror the global
/// state and score fidelity; in superdense coding only Alice knows the message.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WireParams {
    Teleport {
        input: InputQubit,
        forced: Option<BellState>,
    },
    Superdense {
        message: Option<Message2>,
    },
}

impl WireParams {
    pub fn protocol(&self) -> Protocol {
        match self {
            WireParams::Teleport { .. } => Protocol::Teleport,
            WireParams::Superdense { .. } => Protocol::Superdense,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WireOutcome {
    pub role: Role,
    pub seed: u64,
    pub verdict: Verdict,
}

struct Line {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Line {
    fn new(stream: TcpStream) -> Result<Self> {
        stream.set_read_timeout(Some(IO_TIMEOUT))?;
        stream.set_write_timeout(Some(IO_TIMEOUT))?;
        let writer = stream.try_clone()?;
        Ok(Self {
            reader: BufReader::new(stream),
            writer,
        })
    }

    fn send(&mut self, line: &str) -> Result<()> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        Ok(())
    }

    fn recv(&mut self) -> Result<String> {
        let mut buf = String::new();
        if self.reader.read_line(&mut buf)? == 0 {
            return Err(Error::Transport(std::io::Error::new(
                ErrorKind::UnexpectedEof,
                "peer closed the connection",
            )));
        }
        Ok(buf.trim_end_matches(['\r', '\n']).to_string())
    }

    /// Reads a line that must start with `keyword`; `ERR` lines become handshake errors.
    fn expect(&mut self, keyword: &str) -> Result<String> {
        let line = self.recv()?;
        let (head, rest) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        if head == "ERR" {
            return Err(Error::Handshake(rest.to_string()));
        }
        if head != keyword {
            return Err(Error::Protocol(format!("expected {keyword}, got {line:?}")));
        }
        Ok(rest.to_string())
    }
}

fn connect_with_retry(endpoint: &str) -> Result<TcpStream> {
    let deadline = Instant::now() + CONNECT_PATIENCE;
    loop {
        let addrs: Vec<_> = endpoint.to_socket_addrs()?.collect();
        let mut last = None;
        for addr in &addrs {
            match TcpStream::connect_timeout(addr, IO_TIMEOUT) {
                Ok(s) => return Ok(s),
                Err(e) => last = Some(e),
            }
        }
        if Instant::now() >= deadline {
            return Err(Error::Transport(last.unwrap_or_else(|| {
                std::io::Error::new(ErrorKind::NotFound, format!("{endpoint} resolved to nothing"))
            })));
        }
        thread::sleep(Duration::from_millis(50));
    }
}

/// Runs one side of the demo. Bob binds `endpoint` and serves one session;
/// Alice connects, retrying briefly while Bob starts up.
pub fn run_wire_demo(role: Role, endpoint: &str, params: WireParams, seed: u64) -> Result<WireOutcome> {
    match role {
        Role::Alice => run_alice(connect_with_retry(endpoint)?, params, seed),
        Role::Bob => {
            let listener = TcpListener::bind(endpoint)?;
            serve_bob(&listener, params)
        }
    }
}

/// Alice's side on an open connection.
pub fn run_alice(stream: TcpStream, params: WireParams, seed: u64) -> Result<WireOutcome> {
    let mut line = Line::new(stream)?;
    line.send(&format!("HELLO {PROTOCOL_VERSION} {seed}"))?;
    let peer_protocol = line.expect("OK")?;
    let protocol = params.protocol();
    if peer_protocol != protocol.as_str() {
        line.send(&format!("ERR protocol mismatch: alice runs {protocol}, bob runs {peer_protocol}"))?;
        return Err(Error::Handshake(format!(
            "bob runs {peer_protocol:?} but alice runs {protocol}"
        )));
    }

    let expected = match params {
        WireParams::Teleport { input, forced } => {
            let run = teleport::run_teleportation_with(&input, seed, forced)?;
            line.send(&format!("CC {}", run.outcome.bits()))?;
            Verdict::Fidelity { value: run.fidelity }
        }
        WireParams::Superdense { message } => {
            let m = message.ok_or_else(|| Error::Validation("alice needs a message".into()))?;
            let enc = superdense::encoding_for(m);
            line.send(&format!("QUBIT-SENT {}", enc.unitary_name))?;
            Verdict::Decoded { message: m }
        }
    };

    let peer: Verdict = line.expect("DONE")?.parse()?;
    if peer.to_string() != expected.to_string() {
        return Err(Error::Protocol(format!("bob reports {peer} but alice expected {expected}")));
    }
    Ok(WireOutcome {
        role: Role::Alice,
        seed,
        verdict: peer,
    })
}

/// Accepts one connection and runs Bob's side.
pub fn serve_bob(listener: &TcpListener, params: WireParams) -> Result<WireOutcome> {
    let (stream, _) = listener.accept()?;
    run_bob(stream, params)
}

pub fn run_bob(stream: TcpStream, params: WireParams) -> Result<WireOutcome> {
    let mut line = Line::new(stream)?;
    let hello = line.expect("HELLO")?;
    let mut parts = hello.split(' ');
    let version = parts.next().unwrap_or_default();
    if version != PROTOCOL_VERSION {
        line.send(&format!("ERR unsupported version {version:?}; expected {PROTOCOL_VERSION}"))?;
        return Err(Error::Handshake(format!(
            "peer speaks {version:?}, expected {PROTOCOL_VERSION}"
        )));
    }
    let seed: u64 = match (parts.next().map(str::parse), parts.next()) {
        (Some(Ok(seed)), None) => seed,
        _ => {
            line.send("ERR malformed HELLO")?;
            return Err(Error::Handshake(format!("malformed HELLO line {hello:?}")));
        }
    };
    line.send(&format!("OK {}", params.protocol()))?;

    let verdict = match params {
        WireParams::Teleport { input, .. } => {
            let bits: Message2 = line
                .expect("CC")?
                .parse()
                .map_err(|e| Error::Protocol(format!("bad CC payload: {e}")))?;
            let outcome = BellOutcome::from_bits(bits);
            let global = tensor(&input.state(), &BellState::PhiPlus.vector())?;
            let collapsed = measure_forced(&global, &bell_projectors_ua(), outcome.tag.index())?.collapsed;
            let bob = apply_1q(&bob_state(&collapsed, outcome.tag)?, &correction_for(outcome), 1)?;
            Verdict::Fidelity {
                value: fidelity(&input.state(), &bob)?,
            }
        }
        WireParams::Superdense { .. } => {
            let name = line.expect("QUBIT-SENT")?;
            let enc = encoding_table()
                .into_iter()
                .find(|e| e.unitary_name == name)
                .ok_or_else(|| Error::Protocol(format!("unknown encoding operation {name:?}")))?;
            let arrived = apply_1q(&BellState::PhiPlus.vector(), &enc.unitary, 1)?;
            Verdict::Decoded {
                message: superdense::decode(&arrived)?,
            }
        }
    };
    line.send(&format!("DONE {verdict}"))?;
    Ok(WireOutcome {
        role: Role::Bob,
        seed,
        verdict,
    })
}
