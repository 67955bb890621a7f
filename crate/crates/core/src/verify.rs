//! Identity checks behind `icl-qproto verify`.
//!
//! Each check reports the largest deviation observed and the bound it must
//! stay under. Counting checks (round trips, classifications) report the
//! number of failures against a bound of zero.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::icl::{self, classify, IclClass, IclDiagram, Phase};
use crate::message::Message2;
use crate::phase_space::{
    self, bloch_to_wannier, contract_bell, dft4, h_states, orthonormality_deviation, wannier_basis, wannier_to_bloch,
    BellState, Sector,
};
use crate::rng::RandomSource;
use crate::statevec::{apply_1q, marginal_probabilities, overlap, reshaped_determinant, tensor, StateVector, Unitary2, Unitary4};
use crate::superdense;
use crate::teleport;

/// Bound for exact algebraic identities.
pub const IDENTITY_BOUND: f64 = 1e-12;
/// Bound for teleportation reconstruction and fidelity.
pub const TELEPORT_BOUND: f64 = 1e-10;
/// Seed for the sampled teleport inputs.
pub const VERIFY_SEED: u64 = 2024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    PhaseSpace,
    Icl,
    Teleport,
    Superdense,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::PhaseSpace => "phase-space",
            Suite::Icl => "icl",
            Suite::Teleport => "teleport",
            Suite::Superdense => "superdense",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All, Suite::PhaseSpace, Suite::Icl, Suite::Teleport, Suite::Superdense]
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "unknown suite {s:?}; expected all|phase-space|icl|teleport|superdense"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub max_dev: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, max_dev: f64, bound: f64) -> Self {
        let passed = max_dev.is_finite() && max_dev <= bound;
        Self {
            suite,
            name: name.into(),
            max_dev,
            bound,
            passed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        if self.bound == 0.0 {
            write!(f, "{}: {status} ({} failures)", self.name, self.max_dev)
        } else {
            write!(
                f,
                "{}: {status} (max dev {:.1e} {} {:.0e})",
                self.name,
                self.max_dev,
                if self.passed { "<=" } else { ">" },
                self.bound
            )
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn phase_distance(a: &StateVector, b: &StateVector) -> f64 {
    overlap(a, b).map_or(f64::INFINITY, |o| (1.0 - o.norm()).abs())
}

fn count(failures: usize) -> f64 {
    failures as f64
}

fn phase_space_checks(out: &mut Vec<Check>) {
    let s = Suite::PhaseSpace;
    let f = dft4();
    out.push(Check::new(
        s,
        "dft4 unitarity",
        (f * f.adjoint()).max_deviation(&Unitary4::identity()),
        IDENTITY_BOUND,
    ));

    let round_trip = wannier_to_bloch(&wannier_basis())
        .and_then(|q| bloch_to_wannier(&q))
        .map(|back| {
            back.iter()
                .zip(wannier_basis().iter())
                .map(|(a, b)| a.max_deviation(b))
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::INFINITY);
    out.push(Check::new(s, "wannier/bloch round trip", round_trip, IDENTITY_BOUND));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let literal = |v: [f64; 4]| StateVector::new(v.iter().map(|x| crate::statevec::c(*x, 0.0)).collect()).expect("unit");
    let (pp, pm) = contract_bell(Sector::Even);
    let (sp, sm) = contract_bell(Sector::Odd);
    let construction = [
        pp.state.max_deviation(&literal([h, 0.0, 0.0, h])),
        pm.state.max_deviation(&literal([h, 0.0, 0.0, -h])),
        sp.state.max_deviation(&literal([0.0, h, h, 0.0])),
        sm.state.max_deviation(&literal([0.0, h, -h, 0.0])),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    out.push(Check::new(s, "bell construction", construction, IDENTITY_BOUND));

    let bells: Vec<StateVector> = BellState::ALL.iter().map(|b| b.vector()).collect();
    out.push(Check::new(
        s,
        "bell orthonormality",
        orthonormality_deviation(&bells).unwrap_or(f64::INFINITY),
        IDENTITY_BOUND,
    ));

    let leak = BellState::ALL
        .iter()
        .flat_map(|b| {
            let v = b.vector();
            b.sector().flip().support().map(move |i| v.amp(i).norm())
        })
        .fold(0.0, f64::max);
    out.push(Check::new(s, "sector disjointness", leak, IDENTITY_BOUND));

    for id in phase_space::superposition_identities() {
        out.push(Check::new(s, id.label.clone(), id.deviation(), IDENTITY_BOUND));
    }

    let det = h_states()
        .iter()
        .map(|(_, v)| reshaped_determinant(v).map_or(f64::INFINITY, |d| d.norm()))
        .fold(0.0, f64::max);
    out.push(Check::new(s, "h-state separability", det, IDENTITY_BOUND));
}

fn icl_checks(out: &mut Vec<Check>) {
    let s = Suite::Icl;
    let (x, z) = (Unitary2::pauli_x(), Unitary2::pauli_z());
    let transitions = [
        ("σx on qubit 1: Φ⁺ → Ψ⁺", &x, BellState::PhiPlus, BellState::PsiPlus),
        ("σz on qubit 1: Φ⁺ → Φ⁻", &z, BellState::PhiPlus, BellState::PhiMinus),
        ("σz on qubit 1: Ψ⁺ → Ψ⁻", &z, BellState::PsiPlus, BellState::PsiMinus),
    ];
    for (name, u, from, to) in transitions {
        let dev = apply_1q(&from.vector(), u, 1).map_or(f64::INFINITY, |v| phase_distance(&v, &to.vector()));
        out.push(Check::new(s, name, dev, IDENTITY_BOUND));
    }

    let mut d = IclDiagram::from_chain(2, Phase::Plus);
    let mut parity = 0.0f64;
    for n in 0..=16u64 {
        let want = if n % 2 == 0 { BellState::PhiPlus } else { BellState::PsiPlus };
        let dev = if d.chain_length() == 2 + n {
            phase_distance(&icl::diagram_to_state(&d), &want.vector())
        } else {
            f64::INFINITY
        };
        parity = parity.max(dev);
        d = icl::extend_sigma_x(&d);
    }
    out.push(Check::new(s, "parity law over 0..=16 σx links", parity, IDENTITY_BOUND));

    let rt = BellState::ALL
        .iter()
        .map(|b| {
            icl::state_to_diagram(*b, None)
                .map_or(f64::INFINITY, |d| phase_distance(&icl::diagram_to_state(&d), &b.vector()))
        })
        .fold(0.0, f64::max);
    out.push(Check::new(s, "diagram/state round trip", rt, IDENTITY_BOUND));

    let misclassified = h_states()
        .iter()
        .filter(|(_, v)| !matches!(classify(v), Ok(IclClass::Product)))
        .count();
    out.push(Check::new(s, "h-states classify as product", count(misclassified), 0.0));

    let bell_ok = BellState::ALL
        .iter()
        .filter(|b| !matches!(classify(&b.vector()), Ok(IclClass::Bell(t)) if t == **b))
        .count();
    out.push(Check::new(s, "bell states classify as bell", count(bell_ok), 0.0));
}

fn teleport_checks(out: &mut Vec<Check>) {
    let s = Suite::Teleport;
    let mut rng = RandomSource::from_seed(VERIFY_SEED);
    let inputs: Vec<_> = (0..100).map(|_| teleport::random_input(&mut rng)).collect();
    let phi = BellState::PhiPlus.vector();

    let mut recon: f64 = 0.0;
    let mut probs: f64 = 0.0;
    let mut marginal: f64 = 0.0;
    for u in &inputs {
        let Ok(global) = tensor(&u.state(), &phi) else {
            recon = f64::INFINITY;
            continue;
        };
        recon = recon.max(
            teleport::decompose(u)
                .reconstruct()
                .map_or(f64::INFINITY, |r| r.max_deviation(&global)),
        );
        match teleport::outcome_probabilities(&global) {
            Ok(p) => probs = p.iter().map(|x| (x - 0.25).abs()).fold(probs, f64::max),
            Err(_) => probs = f64::INFINITY,
        }
        match marginal_probabilities(&global, 3) {
            Ok([p0, p1]) => marginal = marginal.max((p0 - 0.5).abs()).max((p1 - 0.5).abs()),
            Err(_) => marginal = f64::INFINITY,
        }
    }
    out.push(Check::new(s, "decomposition re-sums to u ⊗ Φ⁺ (100 inputs)", recon, TELEPORT_BOUND));
    out.push(Check::new(s, "branch probabilities are 1/4", probs, IDENTITY_BOUND));

    let mut fid: f64 = 0.0;
    for (i, u) in inputs.iter().enumerate() {
        for tag in BellState::ALL {
            let dev = teleport::run_teleportation_with(u, i as u64, Some(tag))
                .map_or(f64::INFINITY, |r| (1.0 - r.fidelity).abs());
            fid = fid.max(dev);
        }
    }
    out.push(Check::new(s, "fidelity for all 4 forced outcomes (400 runs)", fid, TELEPORT_BOUND));
    out.push(Check::new(s, "bob marginal before bits is (1/2, 1/2)", marginal, IDENTITY_BOUND));
}

fn superdense_checks(out: &mut Vec<Check>) {
    let s = Suite::Superdense;
    let phi = BellState::PhiPlus.vector();
    let encoded: Vec<_> = Message2::ALL.iter().map(|m| superdense::encode(*m, &phi)).collect();
    let wrong = Message2::ALL
        .iter()
        .zip(&encoded)
        .filter(|(m, e)| !matches!(e.as_ref().map(superdense::decode), Ok(Ok(d)) if d == **m))
        .count();
    out.push(Check::new(s, "4/4 messages round trip", count(wrong), 0.0));

    let states: Vec<StateVector> = encoded.iter().filter_map(|e| e.as_ref().ok().cloned()).collect();
    let ortho = if states.len() == 4 {
        orthonormality_deviation(&states).unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    out.push(Check::new(s, "encoded states orthonormal", ortho, IDENTITY_BOUND));

    let marg = states
        .iter()
        .map(|v| {
            marginal_probabilities(v, 2).map_or(f64::INFINITY, |[p0, p1]| (p0 - 0.5).abs().max((p1 - 0.5).abs()))
        })
        .fold(0.0, f64::max);
    out.push(Check::new(s, "bob marginal is (1/2, 1/2)", marg, IDENTITY_BOUND));
}

pub fn verify(suite: Suite) -> Report {
    let mut checks = Vec::new();
    let want = |x: Suite| suite == Suite::All || suite == x;
    if want(Suite::PhaseSpace) {
        phase_space_checks(&mut checks);
    }
    if want(Suite::Icl) {
        icl_checks(&mut checks);
    }
    if want(Suite::Teleport) {
        teleport_checks(&mut checks);
    }
    if want(Suite::Superdense) {
        superdense_checks(&mut checks);
    }
    Report { checks }
}
