//! Discrete phase space on the four-site ring of two-qubit Wannier states.
//!
//! The four computational states |R₀⟩..|R₃⟩ = |00⟩, |01⟩, |10⟩, |11⟩ sit on a
//! periodic lattice (|R₄⟩ ≡ |R₀⟩). Bloch states over momenta kₙ = (2π/4)·n
//! come from the 4-point DFT. Restricting to a two-state sector and applying
//! the 2×2 Hadamard yields the Bell basis: the even sector {|00⟩, |11⟩} gives
//! Φ±, the odd sector {|01⟩, |10⟩} gives Ψ±.
//!
//! Normalization is 1/√4 = 1/2 in both directions, so `dft4() · dft4()† = I₄`
//! holds exactly rather than up to a bookkeeping factor.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{overlap, Amplitude, Projector, StateVector, Unitary2, Unitary4, EPS, I, ONE, ZERO};

/// Lattice momentum kₙ = (2π/4)·n, n ∈ {0, 1, 2, 3}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Momentum(u8);

impl Momentum {
    pub const ALL: [Momentum; 4] = [Momentum(0), Momentum(1), Momentum(2), Momentum(3)];

    pub fn new(n: u8) -> Result<Self> {
        if n > 3 {
            return Err(Error::Validation(format!("momentum index {n} outside 0..=3")));
        }
        Ok(Self(n))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn value(self) -> f64 {
        2.0 * PI / 4.0 * f64::from(self.0)
    }
}

/// iᵐ for integer m, exact.
fn i_pow(m: usize) -> Amplitude {
    [ONE, I, -ONE, -I][m % 4]
}

/// The normalized 4-point DFT, entry (n, r) = e^{i kₙ r} / 2.
pub fn dft4() -> Unitary4 {
    let mut m = [[ZERO; 4]; 4];
    for (n, row) in m.iter_mut().enumerate() {
        for (r, e) in row.iter_mut().enumerate() {
            *e = i_pow(n * r) * 0.5;
        }
    }
    Unitary4::new(m).expect("the DFT is unitary")
}

/// Inverse transform, entry (n, r) = e^{-i kₙ r} / 2.
pub fn dft4_inverse() -> Unitary4 {
    dft4().adjoint()
}

/// The Wannier basis |00⟩, |01⟩, |10⟩, |11⟩.
pub fn wannier_basis() -> [StateVector; 4] {
    std::array::from_fn(|i| StateVector::basis(2, i).expect("valid basis index"))
}

/// Maximum |⟨aᵢ|aⱼ⟩ − δᵢⱼ| over all pairs.
pub fn orthonormality_deviation(states: &[StateVector]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((overlap(a, b)? - target).norm());
        }
    }
    Ok(worst)
}

/// Linear recombination `out[k] = Σᵣ u[k][r] · states[r]`.
pub fn mix(u: &Unitary4, states: &[StateVector; 4]) -> Result<[StateVector; 4]> {
    let dim = states[0].len();
    if states.iter().any(|s| s.len() != dim) {
        return Err(Error::Dimension("quartet members have different sizes".into()));
    }
    let mut out = Vec::with_capacity(4);
    for row in u.matrix() {
        let amps: Vec<Amplitude> = (0..dim)
            .map(|idx| row.iter().zip(states).map(|(w, s)| w * s.amp(idx)).sum())
            .collect();
        out.push(StateVector::new(amps)?);
    }
    Ok(out.try_into().expect("four rows"))
}

/// Bloch states |B₀⟩, |B_{π/2}⟩, |B_π⟩, |B_{3π/2}⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochQuartet {
    states: [StateVector; 4],
}

impl BlochQuartet {
    pub fn new(states: [StateVector; 4]) -> Result<Self> {
        let dev = orthonormality_deviation(&states)?;
        if dev > EPS {
            return Err(Error::Validation(format!(
                "quartet is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self { states })
    }

    pub fn state(&self, k: Momentum) -> &StateVector {
        &self.states[k.index()]
    }

    pub fn states(&self) -> &[StateVector; 4] {
        &self.states
    }
}

/// Forward transform of the canonical Wannier basis.
pub fn wannier_to_bloch(basis: &[StateVector; 4]) -> Result<BlochQuartet> {
    for (i, (got, want)) in basis.iter().zip(wannier_basis().iter()).enumerate() {
        if !got.approx_eq(want, EPS) {
            return Err(Error::Validation(format!(
                "input {i} is not the Wannier basis state |R{i}⟩"
            )));
        }
    }
    BlochQuartet::new(mix(&dft4(), basis)?)
}

/// Inverse transform; for the quartet built by [`wannier_to_bloch`] this
/// returns the Wannier basis.
pub fn bloch_to_wannier(q: &BlochQuartet) -> Result<[StateVector; 4]> {
    let dev = orthonormality_deviation(&q.states)?;
    if dev > EPS {
        return Err(Error::Validation(format!(
            "quartet is not orthonormal (deviation {dev:e})"
        )));
    }
    mix(&dft4_inverse(), &q.states)
}

/// Two-state sector of the two-qubit space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// span{|00⟩, |11⟩}, the "triplet" label.
    Even,
    /// span{|01⟩, |10⟩}, the singlet.
    Odd,
}

impl Sector {
    /// Basis indices the sector is supported on.
    pub fn support(self) -> [usize; 2] {
        match self {
            Sector::Even => [0, 3],
            Sector::Odd => [1, 2],
        }
    }

    pub fn of_parity(n: u64) -> Self {
        if n.is_multiple_of(2) {
            Sector::Even
        } else {
            Sector::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sector::Even => Sector::Odd,
            Sector::Odd => Sector::Even,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellState {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl BellState {
    /// In outcome order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn sector(self) -> Sector {
        match self {
            BellState::PhiPlus | BellState::PhiMinus => Sector::Even,
            BellState::PsiPlus | BellState::PsiMinus => Sector::Odd,
        }
    }

    /// +1 for the symmetric member of the sector pair, −1 for its σz partner.
    pub fn sign(self) -> i8 {
        match self {
            BellState::PhiPlus | BellState::PsiPlus => 1,
            BellState::PhiMinus | BellState::PsiMinus => -1,
        }
    }

    pub fn from_parts(sector: Sector, sign: i8) -> Self {
        match (sector, sign >= 0) {
            (Sector::Even, true) => BellState::PhiPlus,
            (Sector::Even, false) => BellState::PhiMinus,
            (Sector::Odd, true) => BellState::PsiPlus,
            (Sector::Odd, false) => BellState::PsiMinus,
        }
    }

    /// Canonical amplitudes, built by sector contraction.
    pub fn vector(self) -> StateVector {
        let (plus, minus) = contract_bell(self.sector());
        if self.sign() > 0 {
            plus.state
        } else {
            minus.state
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Φ⁺",
            BellState::PhiMinus => "Φ⁻",
            BellState::PsiPlus => "Ψ⁺",
            BellState::PsiMinus => "Ψ⁻",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown Bell state {s:?}; expected phi+|phi-|psi+|psi-")))
    }
}

/// A Bell tag with its amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalBell {
    pub tag: BellState,
    pub state: StateVector,
}

/// Hadamard-mixes two basis states: ((a+b)/√2, (a−b)/√2).
fn hadamard_pair(a: usize, b: usize) -> (StateVector, StateVector) {
    let h = Unitary2::hadamard();
    let rows = h.matrix();
    let build = |row: &[Amplitude; 2]| {
        let mut amps = vec![ZERO; 4];
        amps[a] += row[0];
        amps[b] += row[1];
        StateVector::new(amps).expect("Hadamard rows are unit vectors")
    };
    (build(&rows[0]), build(&rows[1]))
}

/// Contracts the phase space to one sector and returns its Bell pair.
///
/// Even gives (Φ⁺, Φ⁻) from {|00⟩, |11⟩}; odd gives (Ψ⁺, Ψ⁻) from
/// {|01⟩, |10⟩}, with Ψ⁻ = (|01⟩ − |10⟩)/√2.
pub fn contract_bell(sector: Sector) -> (CanonicalBell, CanonicalBell) {
    let [a, b] = sector.support();
    let (plus, minus) = hadamard_pair(a, b);
    (
        CanonicalBell {
            tag: BellState::from_parts(sector, 1),
            state: plus,
        },
        CanonicalBell {
            tag: BellState::from_parts(sector, -1),
            state: minus,
        },
    )
}

/// Rank-one projectors onto Φ⁺, Φ⁻, Ψ⁺, Ψ⁻ (two-qubit space).
pub fn bell_projectors() -> Vec<Projector> {
    BellState::ALL.iter().map(|b| Projector::onto(&b.vector())).collect()
}

/// Unentangled Hadamard pairs.
///
/// H0/H1 mix |00⟩ with |10⟩, H2/H3 mix |00⟩ with |01⟩, H4/H5 mix |10⟩ with
/// |11⟩. The construction yields the H0/H1 pair from three different Bloch
/// pairs with an identical result; one copy is kept. The H4/H5 pair is given
/// the same 1/√2 normalization as the others (the source form omits it).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HState {
    H0,
    H1,
    H2,
    H3,
    H4,
    H5,
}

impl HState {
    pub const ALL: [HState; 6] = [HState::H0, HState::H1, HState::H2, HState::H3, HState::H4, HState::H5];

    fn pair(self) -> (usize, usize) {
        match self {
            HState::H0 | HState::H1 => (0, 2),
            HState::H2 | HState::H3 => (0, 1),
            HState::H4 | HState::H5 => (2, 3),
        }
    }

    pub fn vector(self) -> StateVector {
        let (a, b) = self.pair();
        let (plus, minus) = hadamard_pair(a, b);
        match self {
            HState::H0 | HState::H2 | HState::H4 => plus,
            HState::H1 | HState::H3 | HState::H5 => minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HState::H0 => "H0",
            HState::H1 => "H1",
            HState::H2 => "H2",
            HState::H3 => "H3",
            HState::H4 => "H4",
            HState::H5 => "H5",
        }
    }
}

pub fn h_states() -> Vec<(HState, StateVector)> {
    HState::ALL.iter().map(|h| (*h, h.vector())).collect()
}

/// One inverse-Hadamard identity: (X ± Y)/√2 = |ab⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositionIdentity {
    pub label: String,
    pub combination: StateVector,
    pub expected: StateVector,
}

impl SuperpositionIdentity {
    pub fn deviation(&self) -> f64 {
        self.combination.max_deviation(&self.expected)
    }

    pub fn holds(&self) -> bool {
        self.deviation() <= EPS
    }
}

fn combine(label: String, x: &StateVector, y: &StateVector, sign: f64, expected: usize) -> SuperpositionIdentity {
    let amps = x
        .amps()
        .iter()
        .zip(y.amps())
        .map(|(a, b)| (a + b * sign) * FRAC_1_SQRT_2)
        .collect();
    SuperpositionIdentity {
        label,
        combination: StateVector::new(amps).expect("sum of orthonormal pair is normalized"),
        expected: StateVector::basis(2, expected).expect("valid basis index"),
    }
}

const KETS: [&str; 4] = ["|00⟩", "|01⟩", "|10⟩", "|11⟩"];

fn identity_table(entries: &[(String, String, StateVector, StateVector, f64, usize)]) -> Vec<SuperpositionIdentity> {
    entries
        .iter()
        .map(|(xn, yn, x, y, sign, target)| {
            let op = if *sign > 0.0 { '+' } else { '−' };
            combine(format!("({xn}{op}{yn})/√2 = {}", KETS[*target]), x, y, *sign, *target)
        })
        .collect()
}

/// The four Bell-pair identities recovering the Wannier states.
pub fn bell_superpositions() -> Vec<SuperpositionIdentity> {
    use BellState::*;
    let e = |a: BellState, b: BellState, sign: f64, t: usize| {
        (a.symbol().to_string(), b.symbol().to_string(), a.vector(), b.vector(), sign, t)
    };
    identity_table(&[
        e(PhiPlus, PhiMinus, 1.0, 0),
        e(PhiPlus, PhiMinus, -1.0, 3),
        e(PsiPlus, PsiMinus, 1.0, 1),
        e(PsiPlus, PsiMinus, -1.0, 2),
    ])
}

/// The six H-pair identities recovering the Wannier states.
pub fn h_superpositions() -> Vec<SuperpositionIdentity> {
    use HState::*;
    let e = |a: HState, b: HState, sign: f64, t: usize| {
        (a.name().to_string(), b.name().to_string(), a.vector(), b.vector(), sign, t)
    };
    identity_table(&[
        e(H0, H1, 1.0, 0),
        e(H0, H1, -1.0, 2),
        e(H2, H3, 1.0, 0),
        e(H2, H3, -1.0, 1),
        e(H4, H5, 1.0, 2),
        e(H4, H5, -1.0, 3),
    ])
}

pub fn superposition_identities() -> Vec<SuperpositionIdentity> {
    let mut all = bell_superpositions();
    all.extend(h_superpositions());
    all
}

/// Bloch state with a literal amplitude list, used in tests and docs.
pub fn bloch_literal(k: Momentum) -> StateVector {
    StateVector::new((0..4).map(|r| i_pow(k.index() * r) * 0.5).collect()).expect("unit vector")
}
