//! Simulator for two-party quantum protocols built on the Bell basis.
//!
//! The Bell basis is obtained from a four-site discrete phase space
//! ([`phase_space`]) and each Bell state has an inverter-chain-link diagram
//! ([`icl`]). On top of an exact small state-vector core ([`statevec`]) the
//! crate runs teleportation ([`teleport`]) and superdense coding
//! ([`superdense`]) as deterministic, seeded, traceable two-party scripts
//! ([`harness`]).

pub mod cli;
pub mod error;
pub mod harness;
pub mod icl;
pub mod message;
pub mod phase_space;
pub mod rng;
pub mod statevec;
pub mod superdense;
pub mod teleport;
pub mod verify;

pub use error::{Error, Result};
pub use message::Message2;
pub use phase_space::{BellState, Sector};
pub use rng::RandomSource;
pub use statevec::{Amplitude, StateVector, Unitary2, Unitary4, EPS};
