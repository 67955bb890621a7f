use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use super::channel::ClassicalChannel;
use super::trace::{Actor, Protocol, ProtocolTrace, Verdict};
use crate::error::{Error, Result};
use crate::message::Message2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartyName {
    Alice,
    Bob,
}

impl From<PartyName> for Actor {
    fn from(p: PartyName) -> Self {
        match p {
            PartyName::Alice => Actor::Alice,
            PartyName::Bob => Actor::Bob,
        }
    }
}

/// Protocol stages in script order. A party only moves forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Idle,
    Sharing,
    Prepared,
    Measured,
    Encoded,
    Sent,
    Received,
    Corrected,
    Decoded,
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Party {
    name: PartyName,
    held: BTreeSet<usize>,
    stage: Stage,
}

impl Party {
    pub fn new(name: PartyName, held: impl IntoIterator<Item = usize>) -> Self {
        Self {
            name,
            held: held.into_iter().collect(),
            stage: Stage::Idle,
        }
    }

    pub fn name(&self) -> PartyName {
        self.name
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn holds(&self, qubit: usize) -> bool {
        self.held.contains(&qubit)
    }

    pub fn held(&self) -> impl Iterator<Item = usize> + '_ {
        self.held.iter().copied()
    }

    pub fn advance(&mut self, to: Stage) -> Result<()> {
        if to <= self.stage {
            return Err(Error::Protocol(format!(
                "{:?} cannot move from {:?} back to {:?}",
                self.name, self.stage, to
            )));
        }
        self.stage = to;
        Ok(())
    }
}

/// Qubits consumed and produced by a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceLedger {
    pub entanglement_consumed: u32,
    pub bits_sent: u32,
    pub qubits_sent: u32,
    pub qubits_reconstructed: u32,
}

/// Turn-based two-party execution: both parties, the classical channel, the
/// resource ledger and the trace being written.
#[derive(Debug)]
pub struct Session {
    pub alice: Party,
    pub bob: Party,
    pub channel: ClassicalChannel,
    pub ledger: ResourceLedger,
    trace: ProtocolTrace,
}

impl Session {
    pub fn new(
        protocol: Protocol,
        seed: Option<u64>,
        alice_qubits: impl IntoIterator<Item = usize>,
        bob_qubits: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let alice = Party::new(PartyName::Alice, alice_qubits);
        let bob = Party::new(PartyName::Bob, bob_qubits);
        if alice.held.intersection(&bob.held).next().is_some() {
            return Err(Error::Protocol("a qubit cannot be held by both parties".into()));
        }
        Ok(Self {
            alice,
            bob,
            channel: ClassicalChannel::new(),
            ledger: ResourceLedger::default(),
            trace: ProtocolTrace::new(protocol, seed),
        })
    }

    pub fn party_mut(&mut self, name: PartyName) -> &mut Party {
        match name {
            PartyName::Alice => &mut self.alice,
            PartyName::Bob => &mut self.bob,
        }
    }

    pub fn record(&mut self, actor: Actor, action: &str, payload: Value) -> Result<u64> {
        self.trace.record(actor, action, payload)
    }

    /// Fails unless `party` holds every listed qubit.
    pub fn require_holds(&self, party: PartyName, qubits: &[usize]) -> Result<()> {
        let p = match party {
            PartyName::Alice => &self.alice,
            PartyName::Bob => &self.bob,
        };
        match qubits.iter().find(|q| !p.holds(**q)) {
            Some(q) => Err(Error::Protocol(format!("{party:?} does not hold qubit {q}"))),
            None => Ok(()),
        }
    }

    pub fn send_bits(&mut self, bits: Message2) {
        self.channel.send(bits);
        self.ledger.bits_sent += 2;
    }

    pub fn recv_bits(&mut self) -> Result<Message2> {
        self.channel.recv()
    }

    /// Moves a physical qubit from Alice to Bob.
    pub fn send_qubit(&mut self, qubit: usize) -> Result<()> {
        if !self.alice.held.remove(&qubit) {
            return Err(Error::Protocol(format!("Alice does not hold qubit {qubit}")));
        }
        self.bob.held.insert(qubit);
        self.ledger.qubits_sent += 1;
        Ok(())
    }

    pub fn finish(mut self, actor: Actor, verdict: Verdict, mut payload: Value) -> Result<ProtocolTrace> {
        if !self.channel.is_empty() {
            return Err(Error::Protocol(format!(
                "{} classical message(s) never received",
                self.channel.len()
            )));
        }
        if let Some(obj) = payload.as_object_mut() {
            obj.insert("ledger".into(), json!(self.ledger));
        }
        self.trace.finalize(actor, verdict, payload)?;
        Ok(self.trace)
    }
}
