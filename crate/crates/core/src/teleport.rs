//! Teleportation of one qubit over a shared Φ⁺ pair.
//!
//! Qubit order is U (the input), A (Alice's half), B (Bob's half), with U the
//! most significant. Expanding U ⊗ Φ⁺_AB in the Bell basis of (U, A) gives
//!
//! ```text
//! ½|Φ⁺⟩(α, β) + ½|Φ⁻⟩ σz(α, β) + ½|Ψ⁺⟩ σx(α, β) + ½|Ψ⁻⟩ σxσz(α, β)
//! ```
//!
//! Alice measures (U, A) in the Bell basis, sends the outcome as two bits, and
//! Bob applies I, σz, σx or σzσx. For Ψ⁻ the product σzσx · σxσz is exactly I.
//!
//! Outcome bits: Φ⁺ → 00, Φ⁻ → 01, Ψ⁺ → 10, Ψ⁻ → 11. The high bit is the
//! sector (odd = 1), the low bit the relative sign (minus = 1).

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::{Actor, PartyName, Protocol, ProtocolTrace, Session, Stage, Verdict};
use crate::message::Message2;
use crate::phase_space::{bell_projectors, BellState, Sector};
use crate::rng::RandomSource;
use crate::statevec::{
    branch_probabilities, measure_forced, measure_projective, overlap, tensor, Amplitude, Projector, StateVector,
    Unitary2, EPS, ZERO,
};

/// Input qubit α|0⟩ + β|1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputQubit {
    #[serde(with = "pair")]
    alpha: Amplitude,
    #[serde(with = "pair")]
    beta: Amplitude,
}

mod pair {
    use super::Amplitude;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(a: &Amplitude, s: S) -> Result<S::Ok, S::Error> {
        [a.re, a.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Amplitude, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Amplitude::new(re, im))
    }
}

impl InputQubit {
    pub fn new(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        let state = StateVector::qubit(alpha, beta)
            .map_err(|e| Error::Validation(format!("input qubit rejected: {e}")))?;
        Ok(Self::from_state(&state))
    }

    fn from_state(s: &StateVector) -> Self {
        Self {
            alpha: s.amp(0),
            beta: s.amp(1),
        }
    }

    pub fn alpha(&self) -> Amplitude {
        self.alpha
    }

    pub fn beta(&self) -> Amplitude {
        self.beta
    }

    pub fn state(&self) -> StateVector {
        StateVector::qubit(self.alpha, self.beta).expect("validated at construction")
    }
}

/// Bell measurement result with its two-bit classical encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellOutcome {
    pub tag: BellState,
}

impl BellOutcome {
    pub fn bits(self) -> Message2 {
        let high = u8::from(self.tag.sector() == Sector::Odd);
        let low = u8::from(self.tag.sign() < 0);
        Message2::new(high, low).expect("bits are 0 or 1")
    }

    pub fn from_bits(bits: Message2) -> Self {
        let sector = if bits.high() == 1 { Sector::Odd } else { Sector::Even };
        let sign = if bits.low() == 1 { -1 } else { 1 };
        Self {
            tag: BellState::from_parts(sector, sign),
        }
    }
}

/// Random input qubit, uniform over the Bloch sphere with a random global
/// phase; three uniform draws.
pub fn random_input(rng: &mut RandomSource) -> InputQubit {
    let cos_theta = 1.0 - 2.0 * rng.next_unit();
    let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
    let phi = std::f64::consts::TAU * rng.next_unit();
    let gamma = std::f64::consts::TAU * rng.next_unit();
    let alpha = Amplitude::from_polar(half.cos(), gamma);
    let beta = Amplitude::from_polar(half.sin(), gamma + phi);
    InputQubit::new(alpha, beta).expect("unit vector by construction")
}

/// Bob's correction for each outcome: I, σz, σx, σzσx.
pub fn correction_for(outcome: BellOutcome) -> Unitary2 {
    let (x, z) = (Unitary2::pauli_x(), Unitary2::pauli_z());
    match outcome.tag {
        BellState::PhiPlus => Unitary2::identity(),
        BellState::PhiMinus => z,
        BellState::PsiPlus => x,
        BellState::PsiMinus => z * x,
    }
}

pub fn correction_name(tag: BellState) -> &'static str {
    match tag {
        BellState::PhiPlus => "identity",
        BellState::PhiMinus => "sigma_z",
        BellState::PsiPlus => "sigma_x",
        BellState::PsiMinus => "sigma_z*sigma_x",
    }
}

/// Matrix taking (α, β) to Bob's conditional state for a Bell outcome:
/// I, σz, σx and σxσz = (0 −1; 1 0).
pub fn conditional_map(tag: BellState) -> Unitary2 {
    let (x, z) = (Unitary2::pauli_x(), Unitary2::pauli_z());
    match tag {
        BellState::PhiPlus => Unitary2::identity(),
        BellState::PhiMinus => z,
        BellState::PsiPlus => x,
        BellState::PsiMinus => x * z,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionEntry {
    pub tag: BellState,
    pub conditional_bob: StateVector,
    pub correction: Unitary2,
    pub coefficient: f64,
}

/// The four Bell-branch terms of U ⊗ Φ⁺, ordered Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportDecomposition {
    entries: [DecompositionEntry; 4],
}

impl TeleportDecomposition {
    pub fn entries(&self) -> &[DecompositionEntry; 4] {
        &self.entries
    }

    pub fn entry(&self, tag: BellState) -> &DecompositionEntry {
        &self.entries[tag.index()]
    }

    /// Σ coefficient · |bell⟩_UA ⊗ conditional_B.
    pub fn reconstruct(&self) -> Result<StateVector> {
        let mut amps = vec![ZERO; 8];
        for e in &self.entries {
            let term = tensor(&e.tag.vector(), &e.conditional_bob)?;
            for (acc, a) in amps.iter_mut().zip(term.amps()) {
                *acc += a * e.coefficient;
            }
        }
        StateVector::new(amps)
    }
}

pub fn decompose(u: &InputQubit) -> TeleportDecomposition {
    let v = [u.alpha, u.beta];
    let entries = BellState::ALL.map(|tag| {
        let cond = conditional_map(tag).apply_vec(&v);
        DecompositionEntry {
            tag,
            conditional_bob: StateVector::qubit(cond[0], cond[1]).expect("unitary image of a unit vector"),
            correction: correction_for(BellOutcome { tag }),
            coefficient: 0.5,
        }
    });
    TeleportDecomposition { entries }
}

/// Bell projectors on (U, A) tensored with the identity on B.
pub fn bell_projectors_ua() -> Vec<Projector> {
    let id = Projector::identity(1);
    bell_projectors().iter().map(|p| p.kron(&id)).collect()
}

fn require_three(state: &StateVector) -> Result<()> {
    if state.qubit_count() != 3 {
        return Err(Error::Dimension(format!(
            "teleportation state needs 3 qubits, got {}",
            state.qubit_count()
        )));
    }
    Ok(())
}

/// Exact probabilities of the four Bell outcomes on (U, A).
pub fn outcome_probabilities(state: &StateVector) -> Result<[f64; 4]> {
    require_three(state)?;
    let p = branch_probabilities(state, &bell_projectors_ua())?;
    Ok([p[0], p[1], p[2], p[3]])
}

/// Bell measurement of qubits (U, A). `forced` picks the branch without
/// drawing randomness; it exists for deterministic tests.
pub fn bell_measure(
    state: &StateVector,
    rng: &mut RandomSource,
    forced: Option<BellState>,
) -> Result<(BellOutcome, StateVector, f64)> {
    require_three(state)?;
    let projectors = bell_projectors_ua();
    let m = match forced {
        Some(tag) => measure_forced(state, &projectors, tag.index())?,
        None => measure_projective(state, &projectors, rng)?,
    };
    let tag = BellState::from_index(m.outcome).expect("four projectors");
    Ok((BellOutcome { tag }, m.collapsed, m.probability))
}

/// Bob's qubit after a Bell collapse: φ_B[j] = Σᵢ conj(bell[i]) · ψ[2i + j].
pub fn bob_state(collapsed: &StateVector, tag: BellState) -> Result<StateVector> {
    require_three(collapsed)?;
    let bell = tag.vector();
    let amps: Vec<Amplitude> = (0..2)
        .map(|j| (0..4).map(|i| bell.amp(i).conj() * collapsed.amp(2 * i + j)).sum())
        .collect();
    StateVector::new(amps)
        .map_err(|e| Error::Protocol(format!("collapsed state is not in the {tag} branch: {e}")))
}

pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(overlap(a, b)?.norm_sqr())
}

/// Result of one in-process run.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportRun {
    pub outcome: BellOutcome,
    pub bob_final: StateVector,
    pub fidelity: f64,
    pub trace: ProtocolTrace,
}

pub fn run_teleportation(u: &InputQubit, seed: u64) -> Result<ProtocolTrace> {
    Ok(run_teleportation_with(u, seed, None)?.trace)
}

/// Full protocol script; six trace events.
pub fn run_teleportation_with(u: &InputQubit, seed: u64, forced: Option<BellState>) -> Result<TeleportRun> {
    let mut rng = RandomSource::from_seed(seed);
    let mut s = Session::new(Protocol::Teleport, Some(seed), [1, 2], [3])?;

    let pair = BellState::PhiPlus.vector();
    s.alice.advance(Stage::Sharing)?;
    s.bob.advance(Stage::Sharing)?;
    s.ledger.entanglement_consumed += 1;
    s.record(
        Actor::System,
        "create-resource",
        json!({"pair": BellState::PhiPlus, "qubits": ["A", "B"], "state": pair}),
    )?;

    s.require_holds(PartyName::Alice, &[1, 2])?;
    let input = u.state();
    let global = tensor(&input, &pair)?;
    s.alice.advance(Stage::Prepared)?;
    s.record(
        Actor::Alice,
        "prepare-input",
        json!({"input": input, "order": ["U", "A", "B"], "state": global}),
    )?;

    let (outcome, collapsed, probability) = bell_measure(&global, &mut rng, forced)?;
    s.alice.advance(Stage::Measured)?;
    s.record(
        Actor::Alice,
        "bell-measure",
        json!({
            "qubits": ["U", "A"],
            "outcome": outcome.tag,
            "bits": outcome.bits(),
            "probability": probability,
            "forced": forced.is_some(),
            "state": collapsed,
        }),
    )?;

    s.send_bits(outcome.bits());
    s.alice.advance(Stage::Sent)?;
    s.record(Actor::Alice, "cc-send", json!({"bits": outcome.bits()}))?;

    let bits = s.recv_bits()?;
    s.bob.advance(Stage::Received)?;
    s.require_holds(PartyName::Bob, &[3])?;
    let received = BellOutcome::from_bits(bits);
    let bob_before = bob_state(&collapsed, received.tag)?;
    let bob_final = crate::statevec::apply_1q(&bob_before, &correction_for(received), 1)?;
    s.bob.advance(Stage::Corrected)?;
    s.ledger.qubits_reconstructed += 1;
    s.record(
        Actor::Bob,
        "correct",
        json!({
            "bits": bits,
            "unitary": correction_name(received.tag),
            "before": bob_before,
            "after": bob_final,
        }),
    )?;

    let f = fidelity(&input, &bob_final)?;
    if (f - 1.0).abs() > EPS {
        return Err(Error::Protocol(format!("teleportation fidelity {f} is not 1")));
    }
    s.alice.advance(Stage::Done)?;
    s.bob.advance(Stage::Done)?;
    let trace = s.finish(Actor::System, Verdict::Fidelity { value: f }, json!({"fidelity": f}))?;
    Ok(TeleportRun {
        outcome,
        bob_final,
        fidelity: f,
        trace,
    })
}

/// Re-derives the resource ledger from a trace's events and checks that one
/// pair was consumed, two bits sent, and one qubit reconstructed with fidelity 1.
pub fn validate_teleport_trace(trace: &ProtocolTrace) -> Result<crate::harness::ResourceLedger> {
    let mut ledger = crate::harness::ResourceLedger::default();
    if trace.protocol() != Protocol::Teleport {
        return Err(Error::Protocol(format!("not a teleport trace: {}", trace.protocol())));
    }
    for e in trace.events() {
        match e.action.as_str() {
            "create-resource" => ledger.entanglement_consumed += 1,
            "cc-send" => {
                let bits: Message2 = serde_json::from_value(e.payload["bits"].clone())
                    .map_err(|err| Error::Protocol(format!("step {}: {err}", e.step)))?;
                ledger.bits_sent += bits.to_string().len() as u32;
            }
            "correct" => ledger.qubits_reconstructed += 1,
            _ => {}
        }
    }
    let expected = crate::harness::ResourceLedger {
        entanglement_consumed: 1,
        bits_sent: 2,
        qubits_sent: 0,
        qubits_reconstructed: 1,
    };
    if ledger != expected {
        return Err(Error::Protocol(format!("resource ledger {ledger:?} != {expected:?}")));
    }
    match trace.verdict() {
        Some(Verdict::Fidelity { value }) if (value - 1.0).abs() <= EPS => Ok(ledger),
        other => Err(Error::Protocol(format!("bad teleport verdict {other:?}"))),
    }
}
