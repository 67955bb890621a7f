//! Two-party protocol execution: parties, the classical channel, traces, and
//! the TCP demo transport.

mod channel;
mod party;
mod trace;
pub mod wire;

pub use channel::ClassicalChannel;
pub use party::{Party, PartyName, ResourceLedger, Session, Stage};
pub use trace::{emit_trace, Actor, Protocol, ProtocolTrace, Sink, TraceEvent, Verdict};
