//! Inverter-chain-link (ICL) diagrams.
//!
//! An ICL diagram models an entangled pair as a chain of inverters
//! ("see-saws"), each one a σx. A singlet-type pair is joined by one link, a
//! triplet-type pair by two (σx ⊗ σx). Applying σx to either qubit adds a link
//! and flips the sector; an even number of extra links acts as the identity.
//! σz leaves the chain alone and toggles the relative phase.
//!
//! Only Bell states have diagrams. [`classify`] separates Bell states from
//! other sector-confined entangled states, product states, and everything else.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{BellState, Sector};
use crate::statevec::{equal_up_to_global_phase, reshaped_determinant, StateVector, EPS};

/// Threshold on |det| of the reshaped amplitude matrix above which a state is entangled.
pub const ENTANGLEMENT_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    pub fn sign(self) -> i8 {
        match self {
            Phase::Plus => 1,
            Phase::Minus => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Phase::Plus),
            -1 => Ok(Phase::Minus),
            _ => Err(Error::Validation(format!("phase must be +1 or -1, got {sign}"))),
        }
    }

    pub fn toggle(self) -> Self {
        match self {
            Phase::Plus => Phase::Minus,
            Phase::Minus => Phase::Plus,
        }
    }
}

impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Phase::from_sign(i8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Chain length, sector and phase of an ICL diagram.
///
/// The sector always matches the chain's parity. Chain length beyond parity
/// is carried as data and does not change the represented state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DiagramJson", into = "DiagramJson")]
pub struct IclDiagram {
    chain_length: u64,
    sector: Sector,
    phase: Phase,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    chain: u64,
    sector: Sector,
    phase: Phase,
}

impl TryFrom<DiagramJson> for IclDiagram {
    type Error = Error;

    fn try_from(j: DiagramJson) -> Result<Self> {
        IclDiagram::new(j.chain, j.sector, j.phase)
    }
}

impl From<IclDiagram> for DiagramJson {
    fn from(d: IclDiagram) -> Self {
        DiagramJson {
            chain: d.chain_length,
            sector: d.sector,
            phase: d.phase,
        }
    }
}

impl IclDiagram {
    pub fn new(chain_length: u64, sector: Sector, phase: Phase) -> Result<Self> {
        if Sector::of_parity(chain_length) != sector {
            return Err(Error::Validation(format!(
                "chain of {chain_length} links cannot be in the {sector} sector"
            )));
        }
        Ok(Self {
            chain_length,
            sector,
            phase,
        })
    }

    /// Diagram whose sector follows from the chain parity.
    pub fn from_chain(chain_length: u64, phase: Phase) -> Self {
        Self {
            chain_length,
            sector: Sector::of_parity(chain_length),
            phase,
        }
    }

    pub fn chain_length(&self) -> u64 {
        self.chain_length
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn bell(&self) -> BellState {
        BellState::from_parts(self.sector, self.phase.sign())
    }
}

impl fmt::Display for IclDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {:+})",
            self.chain_length,
            self.sector,
            self.phase.sign()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "value", rename_all = "kebab-case")]
pub enum IclClass {
    /// One of the four Bell states, up to global phase.
    Bell(BellState),
    /// Entangled, supported in a single sector, but not equal-weight.
    SectorConfined(Sector),
    Product,
    Generic,
}

fn confined_sector(state: &StateVector) -> Option<Sector> {
    [Sector::Even, Sector::Odd].into_iter().find(|s| {
        s.flip()
            .support()
            .iter()
            .all(|&i| state.amp(i).norm() <= EPS)
    })
}

/// Classifies a two-qubit state by ICL representability.
pub fn classify(state: &StateVector) -> Result<IclClass> {
    if state.qubit_count() != 2 {
        return Err(Error::Dimension(format!(
            "ICL classification needs 2 qubits, got {}",
            state.qubit_count()
        )));
    }
    for b in BellState::ALL {
        if equal_up_to_global_phase(state, &b.vector())? {
            return Ok(IclClass::Bell(b));
        }
    }
    let entangled = reshaped_determinant(state)?.norm() > ENTANGLEMENT_THRESHOLD;
    Ok(match (confined_sector(state), entangled) {
        (Some(s), true) => IclClass::SectorConfined(s),
        (_, false) => IclClass::Product,
        (None, true) => IclClass::Generic,
    })
}

/// The Bell state a diagram represents.
pub fn diagram_to_state(d: &IclDiagram) -> StateVector {
    d.bell().vector()
}

/// Adds one σx link: chain + 1, sector flips, phase kept.
pub fn extend_sigma_x(d: &IclDiagram) -> IclDiagram {
    IclDiagram {
        chain_length: d.chain_length + 1,
        sector: d.sector.flip(),
        phase: d.phase,
    }
}

/// σz on one qubit: phase toggles.
pub fn apply_sigma_z(d: &IclDiagram) -> IclDiagram {
    IclDiagram {
        phase: d.phase.toggle(),
        ..*d
    }
}

/// Diagram for a Bell state. Without a hint the minimal chain is used:
/// 2 for Φ±, 1 for Ψ±.
pub fn state_to_diagram(b: BellState, chain_length_hint: Option<u64>) -> Result<IclDiagram> {
    let phase = Phase::from_sign(b.sign())?;
    let chain = match (chain_length_hint, b.sector()) {
        (Some(n), s) if Sector::of_parity(n) != s => {
            return Err(Error::Validation(format!(
                "chain length {n} has the wrong parity for {b} ({s} sector)"
            )))
        }
        (Some(n), _) => n,
        (None, Sector::Even) => 2,
        (None, Sector::Odd) => 1,
    };
    IclDiagram::new(chain, b.sector(), phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::h_states;
    use crate::statevec::{apply_1q, c, Amplitude, Unitary2};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2 as R;

    fn real(v: &[f64]) -> StateVector {
        StateVector::new(v.iter().map(|x| c(*x, 0.0)).collect()).unwrap()
    }

    fn all_diagrams() -> impl Strategy<Value = IclDiagram> {
        (0u64..64, prop::bool::ANY).prop_map(|(n, p)| {
            IclDiagram::from_chain(n, if p { Phase::Plus } else { Phase::Minus })
        })
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&real(&[R, 0.0, 0.0, R])).unwrap(), IclClass::Bell(BellState::PhiPlus));
        assert_eq!(classify(&real(&[R, 0.0, R, 0.0])).unwrap(), IclClass::Product);
        let s5 = 5f64.sqrt();
        assert_eq!(
            classify(&real(&[2.0 / s5, 0.0, 0.0, 1.0 / s5])).unwrap(),
            IclClass::SectorConfined(Sector::Even)
        );
        assert_eq!(classify(&real(&[1.0, 0.0, 0.0, 0.0])).unwrap(), IclClass::Product);
        assert_eq!(classify(&real(&[0.6, 0.0, 0.8, 0.0])).unwrap(), IclClass::Product);
        assert_eq!(classify(&real(&[0.5, 0.5, 0.5, -0.5])).unwrap(), IclClass::Generic);
        let rotated = BellState::PsiMinus.vector().with_global_phase(Amplitude::from_polar(1.0, 0.7)).unwrap();
        assert_eq!(classify(&rotated).unwrap(), IclClass::Bell(BellState::PsiMinus));
        assert!(matches!(classify(&StateVector::zero()), Err(Error::Dimension(_))));
    }

    #[test]
    fn h_states_are_products() {
        for (_, s) in h_states() {
            assert_eq!(classify(&s).unwrap(), IclClass::Product);
        }
    }

    #[test]
    fn diagrams_to_states() {
        let d = |n, p| IclDiagram::from_chain(n, p);
        assert_eq!(diagram_to_state(&d(2, Phase::Plus)), BellState::PhiPlus.vector());
        assert_eq!(diagram_to_state(&d(1, Phase::Plus)), BellState::PsiPlus.vector());
        assert_eq!(diagram_to_state(&d(4, Phase::Plus)), diagram_to_state(&d(2, Phase::Plus)));
    }

    #[test]
    fn sigma_x_extension() {
        let start = IclDiagram::new(2, Sector::Even, Phase::Plus).unwrap();
        let once = extend_sigma_x(&start);
        assert_eq!(once, IclDiagram::new(3, Sector::Odd, Phase::Plus).unwrap());
        assert_eq!(once.bell(), BellState::PsiPlus);
        let twice = extend_sigma_x(&once);
        assert_eq!(twice.chain_length(), 4);
        assert_eq!(twice.bell(), BellState::PhiPlus);

        let psi_minus = IclDiagram::new(1, Sector::Odd, Phase::Minus).unwrap();
        let ext = extend_sigma_x(&psi_minus);
        assert_eq!(ext, IclDiagram::new(2, Sector::Even, Phase::Minus).unwrap());
        // σx ⊗ I on (|01⟩ − |10⟩)/√2 gives (|11⟩ − |00⟩)/√2 = −Φ⁻.
        let flipped = apply_1q(&BellState::PsiMinus.vector(), &Unitary2::pauli_x(), 1).unwrap();
        assert!(flipped.approx_eq(&real(&[-R, 0.0, 0.0, R]), EPS));
        assert!(equal_up_to_global_phase(&flipped, &diagram_to_state(&ext)).unwrap());
    }

    #[test]
    fn sigma_z_toggles_phase() {
        let d = IclDiagram::new(2, Sector::Even, Phase::Plus).unwrap();
        assert_eq!(apply_sigma_z(&d), IclDiagram::new(2, Sector::Even, Phase::Minus).unwrap());
        let s = IclDiagram::new(1, Sector::Odd, Phase::Plus).unwrap();
        assert_eq!(apply_sigma_z(&s).bell(), BellState::PsiMinus);
        assert_eq!(apply_sigma_z(&apply_sigma_z(&d)), d);
    }

    #[test]
    fn minimal_and_hinted_diagrams() {
        assert_eq!(
            state_to_diagram(BellState::PhiMinus, None).unwrap(),
            IclDiagram::new(2, Sector::Even, Phase::Minus).unwrap()
        );
        assert_eq!(
            state_to_diagram(BellState::PsiPlus, None).unwrap(),
            IclDiagram::new(1, Sector::Odd, Phase::Plus).unwrap()
        );
        assert_eq!(state_to_diagram(BellState::PhiPlus, Some(6)).unwrap().chain_length(), 6);
        assert!(matches!(
            state_to_diagram(BellState::PhiPlus, Some(3)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn parity_is_enforced() {
        assert!(IclDiagram::new(3, Sector::Even, Phase::Plus).is_err());
        assert!(serde_json::from_str::<IclDiagram>(r#"{"chain":3,"sector":"even","phase":1}"#).is_err());
        assert!(serde_json::from_str::<IclDiagram>(r#"{"chain":2,"sector":"even","phase":0}"#).is_err());
    }

    #[test]
    fn json_shapes() {
        let d = state_to_diagram(BellState::PsiMinus, None).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"chain":1,"sector":"odd","phase":-1}"#);
        assert_eq!(
            serde_json::to_string(&IclClass::Bell(BellState::PhiPlus)).unwrap(),
            r#"{"class":"bell","value":"phi+"}"#
        );
        assert_eq!(serde_json::to_string(&IclClass::Product).unwrap(), r#"{"class":"product"}"#);
    }

    #[test]
    fn round_trip_all_tags() {
        for b in BellState::ALL {
            let d = state_to_diagram(b, None).unwrap();
            assert!(equal_up_to_global_phase(&diagram_to_state(&d), &b.vector()).unwrap());
        }
    }

    proptest! {
        #[test]
        fn extension_commutes_with_sigma_x(d in all_diagrams(), target in 1usize..=2) {
            let via_diagram = diagram_to_state(&extend_sigma_x(&d));
            let via_gate = apply_1q(&diagram_to_state(&d), &Unitary2::pauli_x(), target).unwrap();
            prop_assert!(equal_up_to_global_phase(&via_diagram, &via_gate).unwrap());
            prop_assert_eq!(extend_sigma_x(&d).chain_length(), d.chain_length() + 1);
        }

        #[test]
        fn phase_toggle_commutes_with_sigma_z(d in all_diagrams(), target in 1usize..=2) {
            let via_diagram = diagram_to_state(&apply_sigma_z(&d));
            let via_gate = apply_1q(&diagram_to_state(&d), &Unitary2::pauli_z(), target).unwrap();
            prop_assert!(equal_up_to_global_phase(&via_diagram, &via_gate).unwrap());
        }
    }
}
