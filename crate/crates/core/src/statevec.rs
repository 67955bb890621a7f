//! Dense state vectors and gates for one to three qubits.
//!
//! Basis ordering puts qubit 1 in the most significant bit: for two qubits,
//! index 0 is |0⟩₁|0⟩₂, 1 is |0⟩₁|1⟩₂, 2 is |1⟩₁|0⟩₂ and 3 is |1⟩₁|1⟩₂.
//! States are immutable; every operation returns a fresh value so protocol
//! traces can keep each intermediate state.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

pub type Amplitude = Complex64;

/// Absolute per-component tolerance used for every equality check.
pub const EPS: f64 = 1e-9;

pub const MAX_QUBITS: usize = 3;

pub(crate) const ZERO: Amplitude = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Amplitude = Complex64::new(1.0, 0.0);
pub(crate) const I: Amplitude = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64, im: f64) -> Amplitude {
    Complex64::new(re, im)
}

/// Normalized amplitude vector over 1..=3 qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Amplitude>,
}

/// JSON shape `{"n": qubit_count, "amps": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<StateJson> for StateVector {
    type Error = Error;

    fn try_from(json: StateJson) -> Result<Self> {
        let amps: Vec<Amplitude> = json.amps.iter().map(|[re, im]| c(*re, *im)).collect();
        let state = StateVector::new(amps)?;
        if state.qubits != json.n {
            return Err(Error::Dimension(format!(
                "\"n\" is {} but {} amplitudes describe {} qubits",
                json.n,
                state.amps.len(),
                state.qubits
            )));
        }
        Ok(state)
    }
}

impl From<StateVector> for StateJson {
    fn from(s: StateVector) -> Self {
        StateJson {
            n: s.qubits,
            amps: s.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    match len {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => Err(Error::Dimension(format!(
            "{len} amplitudes do not describe 1 to {MAX_QUBITS} qubits"
        ))),
    }
}

fn check_finite(amps: &[Amplitude]) -> Result<()> {
    match amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized within [`EPS`].
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        let qubits = qubits_for_len(amps.len())?;
        check_finite(&amps)?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EPS {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { qubits, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Amplitude>) -> Result<Self> {
        let qubits = qubits_for_len(amps.len())?;
        check_finite(&amps)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= EPS {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(Self {
            qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub(crate) fn from_raw(amps: Vec<Amplitude>) -> Self {
        let qubits = qubits_for_len(amps.len()).expect("internal dimension");
        debug_assert!((amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() <= 1e-6);
        Self { qubits, amps }
    }

    /// Computational basis state `index` over `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Dimension(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let len = 1 << qubits;
        if index >= len {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range for {qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; len];
        amps[index] = ONE;
        Ok(Self { qubits, amps })
    }

    pub fn zero() -> Self {
        Self::from_raw(vec![ONE, ZERO])
    }

    pub fn one() -> Self {
        Self::from_raw(vec![ZERO, ONE])
    }

    /// Single qubit α|0⟩ + β|1⟩.
    pub fn qubit(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: Amplitude) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > EPS {
            return Err(Error::Validation(format!(
                "global phase must have unit modulus, got |{phase}| = {}",
                phase.norm()
            )));
        }
        Ok(Self {
            qubits: self.qubits,
            amps: self.amps.iter().map(|a| a * phase).collect(),
        })
    }

    /// Largest componentwise distance `max(|Δre|, |Δim|)`; infinite on dimension mismatch.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.amps.len() != other.amps.len() {
            return f64::INFINITY;
        }
        max_component_deviation(&self.amps, &other.amps)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_deviation(other) <= tol
    }

    /// Born probabilities of the computational basis outcomes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", a.re, a.im)?;
        }
        write!(f, ")")
    }
}

pub(crate) fn max_component_deviation(a: &[Amplitude], b: &[Amplitude]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.re - y.re).abs().max((x.im - y.im).abs()))
        .fold(0.0, f64::max)
}

/// Square unitary matrix of dimension `D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary<const D: usize>([[Amplitude; D]; D]);

pub type Unitary2 = Unitary<2>;
pub type Unitary4 = Unitary<4>;

impl<const D: usize> Unitary<D> {
    /// Accepts `m` only when `m·m† = I` entrywise within [`EPS`].
    pub fn new(m: [[Amplitude; D]; D]) -> Result<Self> {
        if let Some(index) = m.iter().flatten().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let u = Self(m);
        let deviation = u.unitarity_deviation();
        if deviation > EPS {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; D]; D];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self(m)
    }

    pub fn matrix(&self) -> &[[Amplitude; D]; D] {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Amplitude {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[ZERO; D]; D];
        for (r, row) in m.iter_mut().enumerate() {
            for (col, e) in row.iter_mut().enumerate() {
                *e = self.0[col][r].conj();
            }
        }
        Self(m)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|row| row.map(|e| e.conj())))
    }

    pub fn apply_vec(&self, v: &[Amplitude; D]) -> [Amplitude; D] {
        let mut out = [ZERO; D];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        max_component_deviation(self.0.as_flattened(), other.0.as_flattened())
    }

    /// Entrywise max distance of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        (*self * self.adjoint()).max_deviation(&Self::identity())
    }

    /// Equal to `other` up to a global unit-modulus factor, within `tol`.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        // Hilbert-Schmidt overlap |tr(A†B)| / D reaches 1 only for B = e^{iθ}A.
        let tr: Amplitude = (self.adjoint() * *other).0.iter().enumerate().map(|(i, r)| r[i]).sum();
        (tr.norm() / D as f64 - 1.0).abs() <= tol
    }
}

impl<const D: usize> Mul for Unitary<D> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = [[ZERO; D]; D];
        for (r, row) in m.iter_mut().enumerate() {
            for (col, e) in row.iter_mut().enumerate() {
                *e = (0..D).map(|k| self.0[r][k] * rhs.0[k][col]).sum();
            }
        }
        Self(m)
    }
}

impl Unitary<2> {
    /// Pauli σx, the inverter.
    pub fn pauli_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    /// Pauli σz, the phase operator.
    pub fn pauli_z() -> Self {
        Self([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
    }
}

impl Unitary<4> {
    /// Applies the matrix to a two-qubit state.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.qubits != 2 {
            return Err(Error::Dimension(format!(
                "4×4 unitary needs a 2-qubit state, got {} qubits",
                state.qubits
            )));
        }
        let v: [Amplitude; 4] = state.amps[..].try_into().expect("length 4");
        Ok(StateVector::from_raw(self.apply_vec(&v).to_vec()))
    }
}

/// `a ⊗ b` with `a`'s qubits in the high-order positions.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let qubits = a.qubits + b.qubits;
    if qubits > MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "tensor product of {} and {} qubits exceeds {MAX_QUBITS}",
            a.qubits, b.qubits
        )));
    }
    let amps = a
        .amps
        .iter()
        .flat_map(|x| b.amps.iter().map(move |y| x * y))
        .collect();
    Ok(StateVector { qubits, amps })
}

/// Applies `u` to qubit `target` (1-based, qubit 1 most significant).
pub fn apply_1q(state: &StateVector, u: &Unitary2, target: usize) -> Result<StateVector> {
    if target == 0 || target > state.qubits {
        return Err(Error::QubitIndex {
            index: target,
            qubits: state.qubits,
        });
    }
    let mask = 1usize << (state.qubits - target);
    let mut amps = state.amps.clone();
    for i in (0..amps.len()).filter(|i| i & mask == 0) {
        let j = i | mask;
        let [x, y] = u.apply_vec(&[state.amps[i], state.amps[j]]);
        amps[i] = x;
        amps[j] = y;
    }
    Ok(StateVector {
        qubits: state.qubits,
        amps,
    })
}

fn same_dims(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.qubits != b.qubits {
        return Err(Error::Dimension(format!(
            "qubit counts differ: {} vs {}",
            a.qubits, b.qubits
        )));
    }
    Ok(())
}

/// Inner product ⟨a|b⟩.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Amplitude> {
    same_dims(a, b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// True iff |⟨a|b⟩| = 1 within [`EPS`].
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector) -> Result<bool> {
    Ok((overlap(a, b)?.norm() - 1.0).abs() <= EPS)
}

/// Determinant of the 2×2 amplitude matrix `[[a00, a01], [a10, a11]]`.
/// Zero exactly for product states.
pub fn reshaped_determinant(state: &StateVector) -> Result<Amplitude> {
    if state.qubits != 2 {
        return Err(Error::Dimension(format!(
            "reshaped determinant needs 2 qubits, got {}",
            state.qubits
        )));
    }
    let a = &state.amps;
    Ok(a[0] * a[3] - a[1] * a[2])
}

/// Computational-basis probabilities `[P(0), P(1)]` for one qubit (1-based).
pub fn marginal_probabilities(state: &StateVector, qubit: usize) -> Result<[f64; 2]> {
    if qubit == 0 || qubit > state.qubits {
        return Err(Error::QubitIndex {
            index: qubit,
            qubits: state.qubits,
        });
    }
    let mask = 1usize << (state.qubits - qubit);
    let mut p = [0.0; 2];
    for (i, a) in state.amps.iter().enumerate() {
        p[usize::from(i & mask != 0)] += a.norm_sqr();
    }
    Ok(p)
}

/// Dense orthogonal projector on the full state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    dim: usize,
    m: Vec<Amplitude>,
}

impl Projector {
    /// Rank-one projector |v⟩⟨v|.
    pub fn onto(v: &StateVector) -> Self {
        let dim = v.len();
        let m = v
            .amps
            .iter()
            .flat_map(|r| v.amps.iter().map(move |col| r * col.conj()))
            .collect();
        Self { dim, m }
    }

    pub fn identity(qubits: usize) -> Self {
        let dim = 1 << qubits;
        let mut m = vec![ZERO; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = ONE;
        }
        Self { dim, m }
    }

    /// Projectors onto each computational basis state.
    pub fn computational(qubits: usize) -> Vec<Self> {
        (0..1usize << qubits)
            .map(|i| Self::onto(&StateVector::basis(qubits, i).expect("valid basis index")))
            .collect()
    }

    /// `self ⊗ other`, `self` acting on the high-order qubits.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut m = vec![ZERO; dim * dim];
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.m[r1 * self.dim + c1];
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        let row = r1 * other.dim + r2;
                        let col = c1 * other.dim + c2;
                        m[row * dim + col] = a * other.m[r2 * other.dim + c2];
                    }
                }
            }
        }
        Self { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Amplitude {
        self.m[row * self.dim + col]
    }

    fn apply(&self, v: &[Amplitude]) -> Vec<Amplitude> {
        self.m
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn matmul(&self, other: &Self) -> Vec<Amplitude> {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            for col in 0..d {
                out[r * d + col] = (0..d).map(|k| self.m[r * d + k] * other.m[k * d + col]).sum();
            }
        }
        out
    }
}

/// Checks Hermiticity, idempotence, mutual orthogonality and completeness.
pub fn validate_resolution(projectors: &[Projector], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidProjectors("no projectors given".into()));
    }
    let zero = vec![ZERO; dim * dim];
    let mut sum = vec![ZERO; dim * dim];
    for (k, p) in projectors.iter().enumerate() {
        if p.dim != dim {
            return Err(Error::InvalidProjectors(format!(
                "projector {k} has dimension {} but the state has {dim}",
                p.dim
            )));
        }
        for r in 0..dim {
            for col in 0..dim {
                let d = p.entry(r, col) - p.entry(col, r).conj();
                if d.re.abs() > EPS || d.im.abs() > EPS {
                    return Err(Error::InvalidProjectors(format!("projector {k} is not Hermitian")));
                }
            }
        }
        if max_component_deviation(&p.matmul(p), &p.m) > EPS {
            return Err(Error::InvalidProjectors(format!("projector {k} is not idempotent")));
        }
        for (j, q) in projectors.iter().enumerate().skip(k + 1) {
            if q.dim == dim && max_component_deviation(&p.matmul(q), &zero) > EPS {
                return Err(Error::InvalidProjectors(format!(
                    "projectors {k} and {j} are not orthogonal"
                )));
            }
        }
        for (s, e) in sum.iter_mut().zip(&p.m) {
            *s += e;
        }
    }
    if max_component_deviation(&sum, &Projector::identity(dim.trailing_zeros() as usize).m) > EPS {
        return Err(Error::InvalidProjectors("projectors do not sum to the identity".into()));
    }
    Ok(())
}

/// Result of a projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: usize,
    pub collapsed: StateVector,
    pub probability: f64,
}

fn checked_resolution(state: &StateVector, projectors: &[Projector]) -> Result<Vec<Vec<Amplitude>>> {
    validate_resolution(projectors, state.len())?;
    Ok(projectors.iter().map(|p| p.apply(&state.amps)).collect())
}

fn collapse(outcome: usize, projected: Vec<Amplitude>, probability: f64) -> Measurement {
    let scale = probability.sqrt();
    let collapsed = StateVector::from_raw(projected.into_iter().map(|a| a / scale).collect());
    Measurement {
        outcome,
        collapsed,
        probability,
    }
}

/// Exact outcome probabilities ‖P_k·ψ‖².
pub fn branch_probabilities(state: &StateVector, projectors: &[Projector]) -> Result<Vec<f64>> {
    Ok(checked_resolution(state, projectors)?
        .iter()
        .map(|v| v.iter().map(|a| a.norm_sqr()).sum())
        .collect())
}

/// Samples an outcome with the Born rule, consuming one uniform draw.
pub fn measure_projective(
    state: &StateVector,
    projectors: &[Projector],
    rng: &mut RandomSource,
) -> Result<Measurement> {
    let projected = checked_resolution(state, projectors)?;
    let probs: Vec<f64> = projected
        .iter()
        .map(|v| v.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let draw = rng.next_unit();
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (k, p) in probs.iter().enumerate() {
        if *p <= 0.0 {
            continue;
        }
        cumulative += p;
        chosen = Some(k);
        if draw < cumulative {
            break;
        }
    }
    // Rounding can leave `draw` above the final cumulative sum; the last
    // nonzero branch absorbs it.
    let k = chosen.expect("a normalized state has a nonzero branch");
    let probability = probs[k];
    let v = projected.into_iter().nth(k).expect("index in range");
    Ok(collapse(k, v, probability))
}

/// Projects onto a chosen outcome, which must have nonzero probability.
pub fn measure_forced(state: &StateVector, projectors: &[Projector], outcome: usize) -> Result<Measurement> {
    let mut projected = checked_resolution(state, projectors)?;
    if outcome >= projected.len() {
        return Err(Error::Validation(format!(
            "forced outcome {outcome} but only {} projectors",
            projected.len()
        )));
    }
    let v = projected.swap_remove(outcome);
    let probability: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    if probability <= EPS {
        return Err(Error::Validation(format!(
            "forced outcome {outcome} has probability {probability:e}"
        )));
    }
    Ok(collapse(outcome, v, probability))
}

/// Returns the outcome that occurs with probability 1 within [`EPS`], if any.
/// Consumes no randomness.
pub fn measure_certain(state: &StateVector, projectors: &[Projector]) -> Result<Option<Measurement>> {
    let projected = checked_resolution(state, projectors)?;
    for (k, v) in projected.into_iter().enumerate() {
        let p: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if (p - 1.0).abs() <= EPS {
            return Ok(Some(collapse(k, v, p)));
        }
    }
    Ok(None)
}
