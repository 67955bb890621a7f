//! Superdense coding: two classical bits carried by one qubit of a shared Φ⁺.
//!
//! Alice applies a local unitary to qubit 1 and sends it to Bob, who
//! identifies the resulting Bell state by projective Bell measurement. The
//! encoding mirrors the teleportation outcome bits:
//!
//! | bits | unitary | Bell state |
//! |------|---------|------------|
//! | 00   | I       | Φ⁺         |
//! | 01   | σz      | Φ⁻         |
//! | 10   | σx      | Ψ⁺         |
//! | 11   | σzσx    | Ψ⁻         |

use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::{Actor, PartyName, Protocol, ProtocolTrace, Session, Stage, Verdict};
use crate::message::Message2;
use crate::phase_space::{bell_projectors, BellState};
use crate::statevec::{apply_1q, StateVector, Unitary2, EPS};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Encoding {
    pub message: Message2,
    pub unitary: Unitary2,
    pub unitary_name: &'static str,
    pub bell: BellState,
}

pub fn encoding_table() -> [Encoding; 4] {
    let (x, z) = (Unitary2::pauli_x(), Unitary2::pauli_z());
    let row = |m: usize, unitary, unitary_name, bell| Encoding {
        message: Message2::ALL[m],
        unitary,
        unitary_name,
        bell,
    };
    [
        row(0, Unitary2::identity(), "identity", BellState::PhiPlus),
        row(1, z, "sigma_z", BellState::PhiMinus),
        row(2, x, "sigma_x", BellState::PsiPlus),
        row(3, z * x, "sigma_z*sigma_x", BellState::PsiMinus),
    ]
}

pub fn encoding_for(m: Message2) -> Encoding {
    encoding_table()[m.value()]
}

/// Alice's local encoding on qubit 1 of the shared pair, which must be Φ⁺.
pub fn encode(m: Message2, shared: &StateVector) -> Result<StateVector> {
    if shared.qubit_count() != 2 || !shared.approx_eq(&BellState::PhiPlus.vector(), EPS) {
        return Err(Error::Resource("shared pair is not Φ⁺".into()));
    }
    apply_1q(shared, &encoding_for(m).unitary, 1)
}

/// Bell measurement with a certain outcome; consumes no randomness.
pub fn measure_bell_certain(state: &StateVector) -> Result<BellState> {
    if state.qubit_count() != 2 {
        return Err(Error::Decode(format!(
            "expected a 2-qubit state, got {} qubits",
            state.qubit_count()
        )));
    }
    let m = crate::statevec::measure_certain(state, &bell_projectors())?
        .ok_or_else(|| Error::Decode("state is not a Bell state".into()))?;
    Ok(BellState::from_index(m.outcome).expect("four projectors"))
}

pub fn decode(state: &StateVector) -> Result<Message2> {
    let tag = measure_bell_certain(state)?;
    encoding_table()
        .iter()
        .find(|e| e.bell == tag)
        .map(|e| e.message)
        .ok_or_else(|| Error::Decode(format!("no message encodes {tag}")))
}

/// Full protocol script; five trace events.
pub fn run_superdense(m: Message2) -> Result<ProtocolTrace> {
    let mut s = Session::new(Protocol::Superdense, None, [1], [2])?;

    let pair = BellState::PhiPlus.vector();
    s.alice.advance(Stage::Sharing)?;
    s.bob.advance(Stage::Sharing)?;
    s.ledger.entanglement_consumed += 1;
    s.record(
        Actor::System,
        "create-resource",
        json!({"pair": BellState::PhiPlus, "qubits": ["A", "B"], "state": pair}),
    )?;

    s.require_holds(PartyName::Alice, &[1])?;
    let enc = encoding_for(m);
    let encoded = encode(m, &pair)?;
    s.alice.advance(Stage::Encoded)?;
    s.record(
        Actor::Alice,
        "encode",
        json!({"message": m, "unitary": enc.unitary_name, "state": encoded}),
    )?;

    s.send_qubit(1)?;
    s.alice.advance(Stage::Sent)?;
    s.record(Actor::Alice, "qubit-send", json!({"qubit": "A", "marker": "QUBIT-SENT"}))?;

    s.require_holds(PartyName::Bob, &[1, 2])?;
    s.bob.advance(Stage::Received)?;
    let tag = measure_bell_certain(&encoded)?;
    s.bob.advance(Stage::Decoded)?;
    s.record(Actor::Bob, "bell-measure", json!({"outcome": tag, "probability": 1.0}))?;

    let decoded = decode(&encoded)?;
    if decoded != m {
        return Err(Error::Protocol(format!("sent {m} but decoded {decoded}")));
    }
    s.alice.advance(Stage::Done)?;
    s.bob.advance(Stage::Done)?;
    s.finish(
        Actor::Bob,
        Verdict::Decoded { message: decoded },
        json!({"message": decoded}),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::orthonormality_deviation;
    use crate::statevec::{c, equal_up_to_global_phase, marginal_probabilities, Amplitude};
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    fn m(s: &str) -> Message2 {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        let phi = BellState::PhiPlus.vector();
        assert_eq!(encode(m("00"), &phi).unwrap(), phi);
        let psi = encode(m("10"), &phi).unwrap();
        assert!(equal_up_to_global_phase(&psi, &BellState::PsiPlus.vector()).unwrap());
        let phim = encode(m("01"), &phi).unwrap();
        assert!(equal_up_to_global_phase(&phim, &BellState::PhiMinus.vector()).unwrap());
    }

    #[test]
    fn encode_needs_phi_plus() {
        let err = encode(m("00"), &BellState::PsiPlus.vector()).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(encode(m("00"), &StateVector::zero()).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&BellState::PhiMinus.vector()).unwrap(), m("01"));
        let rotated = BellState::PsiMinus
            .vector()
            .with_global_phase(Amplitude::from_polar(1.0, 2.1))
            .unwrap();
        assert_eq!(decode(&rotated).unwrap(), m("11"));
        let product = StateVector::new(vec![c(R, 0.0), c(R, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(decode(&product), Err(Error::Decode(_))));
    }

    #[test]
    fn round_trip_and_injectivity() {
        let phi = BellState::PhiPlus.vector();
        let encoded: Vec<StateVector> = Message2::ALL.iter().map(|x| encode(*x, &phi).unwrap()).collect();
        for (x, s) in Message2::ALL.iter().zip(&encoded) {
            assert_eq!(decode(s).unwrap(), *x);
            let [p0, p1] = marginal_probabilities(s, 2).unwrap();
            assert!((p0 - 0.5).abs() <= 1e-12 && (p1 - 0.5).abs() <= 1e-12);
        }
        assert!(orthonormality_deviation(&encoded).unwrap() <= 1e-12);
    }

    #[test]
    fn table_is_a_bijection() {
        let mut tags: Vec<BellState> = encoding_table().iter().map(|e| e.bell).collect();
        tags.sort();
        tags.dedup();
        assert_eq!(tags.len(), 4);
    }

    #[test]
    fn traces() {
        let t = run_superdense(m("11")).unwrap();
        assert_eq!(t.events().len(), 5);
        assert_eq!(t.events()[1].payload["unitary"], "sigma_z*sigma_x");
        assert_eq!(t.verdict(), Some(Verdict::Decoded { message: m("11") }));
        let t = run_superdense(m("00")).unwrap();
        assert_eq!(t.verdict(), Some(Verdict::Decoded { message: m("00") }));
    }
}
