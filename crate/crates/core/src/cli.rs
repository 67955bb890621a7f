//! Command-line front end.
//!
//! [`parse`] turns argv into a validated [`Invocation`]; [`run`] executes it
//! and returns the process exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | verification or protocol failure |
//! | 2 | usage error |
//! | 3 | I/O or transport error |

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::harness::wire::{self, Role, WireParams};
use crate::harness::{emit_trace, Protocol, Sink};
use crate::icl::{classify, state_to_diagram, IclClass};
use crate::message::Message2;
use crate::phase_space::{h_states, BellState};
use crate::rng;
use crate::statevec::{Amplitude, StateVector};
use crate::superdense;
use crate::teleport::{self, InputQubit};
use crate::verify::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest |‖(α, β)‖ − 1| that is silently renormalized.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Fidelity below 1 − this bound fails a teleport run.
pub const FIDELITY_BOUND: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "icl-qproto", version, about = "Bell-basis protocol simulator")]
struct RawCli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: RawCommand,
}

#[derive(Debug, Subcommand)]
enum RawCommand {
    /// Teleport α|0⟩ + β|1⟩ through a shared Φ⁺.
    Teleport {
        #[command(flatten)]
        input: RawInput,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, value_name = "phi+|phi-|psi+|psi-")]
        force_outcome: Option<String>,
        /// Trace file, or `-` for standard output.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Send two classical bits over one qubit of a shared Φ⁺.
    Superdense {
        #[arg(long, value_name = "BITS")]
        message: String,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the Bell states with their diagrams and the H-states.
    Bell {
        #[arg(long)]
        list: bool,
    },
    /// Classify a two-qubit state given as {"n":2,"amps":[[re,im],…]}.
    Icl {
        #[arg(long)]
        state: String,
    },
    /// Run the identity checks.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Run one side of the TCP demo.
    Wire {
        #[arg(long, value_name = "alice|bob")]
        role: String,
        #[arg(long, value_name = "HOST:PORT")]
        endpoint: String,
        #[arg(long, value_name = "teleport|superdense")]
        protocol: String,
        #[command(flatten)]
        input: RawInput,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        force_outcome: Option<String>,
        #[arg(long)]
        message: Option<String>,
    },
}

#[derive(Debug, Args)]
struct RawInput {
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceTarget {
    Stdout,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Teleport {
        input: InputQubit,
        seed: u64,
        forced: Option<BellState>,
        trace: Option<TraceTarget>,
    },
    Superdense {
        message: Message2,
        trace: Option<TraceTarget>,
    },
    BellList,
    Icl {
        state: StateVector,
    },
    Verify {
        suite: Suite,
    },
    Wire {
        role: Role,
        endpoint: String,
        params: WireParams,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub json: bool,
    pub command: Command,
}

/// A rejected command line. `flag` names the offending flag when known;
/// `informational` marks `--help`/`--version` output, which exits 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError {
    pub flag: Option<String>,
    pub message: String,
    pub informational: bool,
}

impl UsageError {
    fn flag(flag: &str, message: impl Into<String>) -> Self {
        Self {
            flag: Some(flag.to_string()),
            message: format!("{flag}: {}", message.into()),
            informational: false,
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

/// Parses `"re,im"`.
pub fn parse_complex(s: &str) -> Result<Amplitude, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM but got {s:?}"))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{x:?} is not a finite number"))
    };
    Ok(Amplitude::new(num(re)?, num(im)?))
}

fn parse_input(raw: &RawInput) -> Result<InputQubit, UsageError> {
    let get = |v: &Option<String>, flag: &str| -> Result<Amplitude, UsageError> {
        let s = v.as_deref().ok_or_else(|| UsageError::flag(flag, "is required"))?;
        parse_complex(s).map_err(|m| UsageError::flag(flag, m))
    };
    let (alpha, beta) = (get(&raw.alpha, "--alpha")?, get(&raw.beta, "--beta")?);
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(UsageError::flag(
            "--beta",
            format!("(alpha, beta) has norm {norm}, expected 1 within {NORM_TOLERANCE:e}"),
        ));
    }
    InputQubit::new(alpha / norm, beta / norm).map_err(|e| UsageError::flag("--alpha", e.to_string()))
}

fn parse_seed(raw: Option<&str>) -> Result<Option<u64>, UsageError> {
    match raw {
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| UsageError::flag("--seed", format!("{s:?} is not an unsigned 64-bit integer"))),
        None => Ok(rng::seed_from_env()),
    }
}

fn require_seed(raw: Option<&str>) -> Result<u64, UsageError> {
    parse_seed(raw)?.ok_or_else(|| UsageError::flag("--seed", format!("is required (or set {})", rng::SEED_ENV)))
}

fn parse_forced(raw: Option<&str>) -> Result<Option<BellState>, UsageError> {
    raw.map(|s| s.parse::<BellState>())
        .transpose()
        .map_err(|e| UsageError::flag("--force-outcome", e.to_string()))
}

fn parse_message(s: &str) -> Result<Message2, UsageError> {
    s.parse()
        .map_err(|_| UsageError::flag("--message", format!("must be two bits like \"10\", got {s:?}")))
}

fn trace_target(p: Option<PathBuf>) -> Option<TraceTarget> {
    p.map(|p| {
        if p.as_os_str() == "-" {
            TraceTarget::Stdout
        } else {
            TraceTarget::File(p)
        }
    })
}

fn validate(raw: RawCommand) -> Result<Command, UsageError> {
    Ok(match raw {
        RawCommand::Teleport {
            input,
            seed,
            force_outcome,
            trace,
        } => Command::Teleport {
            input: parse_input(&input)?,
            seed: require_seed(seed.as_deref())?,
            forced: parse_forced(force_outcome.as_deref())?,
            trace: trace_target(trace),
        },
        RawCommand::Superdense { message, trace } => Command::Superdense {
            message: parse_message(&message)?,
            trace: trace_target(trace),
        },
        RawCommand::Bell { list } => {
            if !list {
                return Err(UsageError::flag("--list", "is required"));
            }
            Command::BellList
        }
        RawCommand::Icl { state } => Command::Icl {
            state: serde_json::from_str(&state).map_err(|e| UsageError::flag("--state", e.to_string()))?,
        },
        RawCommand::Verify { suite } => Command::Verify {
            suite: suite.parse().map_err(|e: Error| UsageError::flag("suite", e.to_string()))?,
        },
        RawCommand::Wire {
            role,
            endpoint,
            protocol,
            input,
            seed,
            force_outcome,
            message,
        } => {
            let role: Role = role.parse().map_err(|e: Error| UsageError::flag("--role", e.to_string()))?;
            let protocol: Protocol = protocol
                .parse()
                .map_err(|e: Error| UsageError::flag("--protocol", e.to_string()))?;
            let params = match protocol {
                Protocol::Teleport => WireParams::Teleport {
                    input: parse_input(&input)?,
                    forced: parse_forced(force_outcome.as_deref())?,
                },
                Protocol::Superdense => {
                    let message = message.as_deref().map(parse_message).transpose()?;
                    if role == Role::Alice && message.is_none() {
                        return Err(UsageError::flag("--message", "is required for alice"));
                    }
                    WireParams::Superdense { message }
                }
            };
            let seed = match (role, protocol) {
                (Role::Alice, Protocol::Teleport) => require_seed(seed.as_deref())?,
                _ => parse_seed(seed.as_deref())?.unwrap_or(0),
            };
            Command::Wire {
                role,
                endpoint,
                params,
                seed,
            }
        }
    })
}

/// Parses a full argv, program name first.
pub fn parse<I, T>(argv: I) -> Result<Invocation, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let raw = RawCli::try_parse_from(argv).map_err(|e| {
        use clap::error::{ContextKind, ContextValue, ErrorKind};
        let flag = match e.get(ContextKind::InvalidArg) {
            Some(ContextValue::String(s)) => Some(s.clone()),
            _ => None,
        };
        UsageError {
            flag,
            message: e.render().to_string().trim_end().to_string(),
            informational: matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion),
        }
    })?;
    Ok(Invocation {
        json: raw.json,
        command: validate(raw.command)?,
    })
}

/// Exit status for a runtime error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Transport(_) | Error::Sink { .. } | Error::Handshake(_) => EXIT_IO,
        Error::Validation(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn print_value(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialize"))
}

fn write_trace(t: &crate::harness::ProtocolTrace, target: &TraceTarget, out: &mut dyn Write) -> crate::Result<()> {
    match target {
        TraceTarget::Stdout => {
            out.write_all(t.to_jsonl()?.as_bytes())?;
            Ok(())
        }
        TraceTarget::File(p) => emit_trace(t, &Sink::File(p.clone())),
    }
}

fn bell_listing() -> Value {
    let bells: Vec<Value> = BellState::ALL
        .iter()
        .map(|b| {
            json!({
                "tag": b,
                "symbol": b.symbol(),
                "state": b.vector(),
                "diagram": state_to_diagram(*b, None).expect("Bell tags have diagrams"),
            })
        })
        .collect();
    let hs: Vec<Value> = h_states()
        .iter()
        .map(|(h, v)| json!({"name": h.name(), "state": v}))
        .collect();
    json!({"bell": bells, "h_states": hs})
}

fn execute(inv: Invocation, out: &mut dyn Write) -> crate::Result<i32> {
    let json = inv.json;
    match inv.command {
        Command::Teleport {
            input,
            seed,
            forced,
            trace,
        } => {
            let run = teleport::run_teleportation_with(&input, seed, forced)?;
            teleport::validate_teleport_trace(&run.trace)?;
            let to_stdout = trace == Some(TraceTarget::Stdout);
            if let Some(t) = &trace {
                write_trace(&run.trace, t, out)?;
            }
            if !to_stdout {
                if json {
                    print_value(
                        out,
                        &json!({"seed": seed, "outcome": run.outcome.tag, "bits": run.outcome.bits(),
                                "fidelity": run.fidelity, "bob": run.bob_final}),
                    )?;
                } else {
                    writeln!(out, "outcome: {} (bits {})", run.outcome.tag.symbol(), run.outcome.bits())?;
                    writeln!(out, "fidelity: {:.12}", run.fidelity)?;
                }
            }
            Ok(if (1.0 - run.fidelity).abs() <= FIDELITY_BOUND {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
        Command::Superdense { message, trace } => {
            let t = superdense::run_superdense(message)?;
            let to_stdout = trace == Some(TraceTarget::Stdout);
            if let Some(target) = &trace {
                write_trace(&t, target, out)?;
            }
            if !to_stdout {
                let decoded = match t.verdict() {
                    Some(crate::harness::Verdict::Decoded { message }) => message,
                    _ => return Err(Error::Protocol("superdense trace has no decoded verdict".into())),
                };
                if json {
                    print_value(out, &json!({"sent": message, "decoded": decoded}))?;
                } else {
                    writeln!(out, "decoded: {decoded}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::BellList => {
            print_value(out, &bell_listing())?;
            Ok(EXIT_OK)
        }
        Command::Icl { state } => {
            let class = classify(&state)?;
            let diagram = match class {
                IclClass::Bell(b) => Some(state_to_diagram(b, None)?),
                _ => None,
            };
            if json {
                print_value(out, &json!({"class": class, "diagram": diagram}))?;
            } else {
                match class {
                    IclClass::Bell(b) => writeln!(out, "class: bell {}", b.symbol())?,
                    IclClass::SectorConfined(s) => writeln!(out, "class: sector-confined ({s})")?,
                    IclClass::Product => writeln!(out, "class: product")?,
                    IclClass::Generic => writeln!(out, "class: generic")?,
                }
                if let Some(d) = diagram {
                    writeln!(out, "diagram: {}", serde_json::to_string(&d).expect("diagram serializes"))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite } => {
            let report = verify::verify(suite);
            if json {
                print_value(out, &json!({"passed": report.all_passed(), "checks": report.checks}))?;
            } else {
                for c in &report.checks {
                    writeln!(out, "{c}")?;
                }
                let failed = report.checks.iter().filter(|c| !c.passed).count();
                writeln!(out, "{} checks, {failed} failed", report.checks.len())?;
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Wire {
            role,
            endpoint,
            params,
            seed,
        } => {
            let outcome = wire::run_wire_demo(role, &endpoint, params, seed)?;
            if json {
                print_value(
                    out,
                    &json!({"role": role.to_string(), "seed": outcome.seed, "verdict": outcome.verdict}),
                )?;
            } else {
                writeln!(out, "{role}: {}", outcome.verdict)?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses and runs; returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match parse(argv) {
        Ok(inv) => inv,
        Err(e) if e.informational => {
            let _ = writeln!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match execute(inv, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
