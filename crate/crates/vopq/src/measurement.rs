//! B92 detection strategies and Born-rule sampling.
//!
//! Two families of measurement are built here. The projective strategy
//! uses one of the complement projectors `P_j = 1 - |psi_j><psi_j|`: a
//! click on `P_j` excludes `psi_j` and therefore concludes the other
//! state. The generalized strategy is the three-outcome measurement for
//! optimal unambiguous discrimination of two equiprobable pure states:
//! it never misidentifies either state, at the price of an inconclusive
//! outcome with probability `|<psi0|psi1>|`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Matrix2, PureState};
use crate::tol;

/// Label attached to a measurement operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    ConcludeState0,
    ConcludeState1,
    Inconclusive,
}

impl Outcome {
    /// The bit value a conclusive outcome identifies, if any.
    pub fn concluded_bit(self) -> Option<u8> {
        match self {
            Outcome::ConcludeState0 => Some(0),
            Outcome::ConcludeState1 => Some(1),
            Outcome::Inconclusive => None,
        }
    }
}

/// Which detection construction an operator set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSetKind {
    PvmChoice0,
    PvmChoice1,
    Povm,
}

/// A finite set of labelled positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct MeasurementOperatorSet {
    kind: OperatorSetKind,
    elements: Vec<(Outcome, Matrix2)>,
}

impl MeasurementOperatorSet {
    /// Validates positivity of each element and completeness of the set.
    pub fn new(kind: OperatorSetKind, elements: Vec<(Outcome, Matrix2)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidOperatorSet("empty operator set".into()));
        }
        let mut sum = Matrix2::zero();
        for (label, op) in &elements {
            let defect = op.hermiticity_defect();
            if defect > tol::EIGENVALUE {
                return Err(Error::InvalidOperatorSet(format!(
                    "{label:?} operator has hermiticity defect {defect:.3e}"
                )));
            }
            let (low, _) = op.hermitian_eigenvalues();
            if low < -tol::EIGENVALUE {
                return Err(Error::InvalidOperatorSet(format!(
                    "{label:?} operator has negative eigenvalue {low:.3e}"
                )));
            }
            sum = sum.add(op);
        }
        let residual = sum.sub(&Matrix2::identity());
        for i in 0..2 {
            for j in 0..2 {
                if residual.entry(i, j).norm() > tol::EIGENVALUE {
                    return Err(Error::InvalidOperatorSet(format!(
                        "operators sum to identity + {:.3e} at entry ({i}, {j})",
                        residual.entry(i, j).norm()
                    )));
                }
            }
        }
        Ok(Self { kind, elements })
    }

    pub fn kind(&self) -> OperatorSetKind {
        self.kind
    }

    pub fn elements(&self) -> &[(Outcome, Matrix2)] {
        &self.elements
    }
}

fn overlap_magnitude(psi0: &PureState, psi1: &PureState) -> f64 {
    psi0.overlap(psi1).norm()
}

/// The projective B92 setting for Bob's choice `j`.
///
/// Returns the pair `{ (ConcludeState(1-j), 1 - |psi_j><psi_j|),
/// (Inconclusive, |psi_j><psi_j|) }`. Inputs that coincide up to a global
/// phase are rejected because neither choice could then conclude anything.
pub fn pvm_for_choice(
    psi0: &PureState,
    psi1: &PureState,
    choice: u8,
) -> Result<MeasurementOperatorSet> {
    if choice > 1 {
        return Err(Error::InvalidConfig(format!(
            "projector choice must be 0 or 1, got {choice}"
        )));
    }
    if overlap_magnitude(psi0, psi1) >= 1.0 - tol::ALGEBRAIC {
        return Err(Error::IdenticalStates);
    }
    let chosen = if choice == 0 { psi0 } else { psi1 };
    let own_projector = *chosen.density().matrix();
    let complement = Matrix2::identity().sub(&own_projector);
    let conclusive_label = if choice == 0 {
        Outcome::ConcludeState1
    } else {
        Outcome::ConcludeState0
    };
    let kind = if choice == 0 {
        OperatorSetKind::PvmChoice0
    } else {
        OperatorSetKind::PvmChoice1
    };
    MeasurementOperatorSet::new(
        kind,
        vec![
            (conclusive_label, complement),
            (Outcome::Inconclusive, own_projector),
        ],
    )
}

/// The optimal unambiguous-discrimination measurement for equal priors.
///
/// With `s = |<psi0|psi1>|`, the conclusive elements are
/// `E_j = |perp(psi_{1-j})><perp(psi_{1-j})| / (1 + s)` and the
/// inconclusive element is `E_? = 1 - E_0 - E_1`. On input `psi_j` this
/// yields outcome `j` with probability `1 - s`, never outcome `1-j`.
/// Orthogonal and identical pairs are rejected as degenerate.
pub fn unambiguous_povm(
    psi0: &PureState,
    psi1: &PureState,
) -> Result<MeasurementOperatorSet> {
    let s = overlap_magnitude(psi0, psi1);
    if s < f64::EPSILON {
        return Err(Error::OrthogonalStates);
    }
    if s >= 1.0 - tol::ALGEBRAIC {
        return Err(Error::IdenticalStates);
    }
    Ok(usd_povm_from_overlap(psi0, psi1, s))
}

/// Unambiguous-discrimination set extended continuously to the orthogonal
/// boundary, where it degenerates to the perfect projective discriminator
/// with a vanishing inconclusive element.
///
/// Identical pairs are still rejected.
pub(crate) fn unambiguous_povm_or_limit(
    psi0: &PureState,
    psi1: &PureState,
) -> Result<MeasurementOperatorSet> {
    let s = overlap_magnitude(psi0, psi1);
    if s >= 1.0 - tol::ALGEBRAIC {
        return Err(Error::IdenticalStates);
    }
    Ok(usd_povm_from_overlap(psi0, psi1, s))
}

fn usd_povm_from_overlap(
    psi0: &PureState,
    psi1: &PureState,
    s: f64,
) -> MeasurementOperatorSet {
    let norm = 1.0 / (1.0 + s);
    let e0 = psi1
        .orthogonal_complement()
        .density()
        .matrix()
        .scale(norm);
    let e1 = psi0
        .orthogonal_complement()
        .density()
        .matrix()
        .scale(norm);
    let e_inconclusive = Matrix2::identity().sub(&e0).sub(&e1);
    MeasurementOperatorSet::new(
        OperatorSetKind::Povm,
        vec![
            (Outcome::ConcludeState0, e0),
            (Outcome::ConcludeState1, e1),
            (Outcome::Inconclusive, e_inconclusive),
        ],
    )
    .expect("unambiguous-discrimination set is positive and complete by construction")
}

/// A validated probability distribution over outcome labels.
///
/// Probabilities within `tol::EIGENVALUE` below zero or above one are
/// clamped; anything further out is rejected, as is a total differing
/// from one by more than `tol::EIGENVALUE`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<(Outcome, f64)>,
}

impl OutcomeDistribution {
    pub fn new(raw: Vec<(Outcome, f64)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::MalformedDistribution("no outcomes".into()));
        }
        let mut entries = Vec::with_capacity(raw.len());
        let mut total = 0.0;
        for (label, p) in raw {
            if !p.is_finite() || !(-tol::EIGENVALUE..=1.0 + tol::EIGENVALUE).contains(&p) {
                return Err(Error::MalformedDistribution(format!(
                    "probability {p} for {label:?}"
                )));
            }
            let clamped = p.clamp(0.0, 1.0);
            total += clamped;
            entries.push((label, clamped));
        }
        if (total - 1.0).abs() > tol::EIGENVALUE {
            return Err(Error::MalformedDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(Outcome, f64)] {
        &self.entries
    }

    pub fn probability(&self, label: Outcome) -> f64 {
        self.entries
            .iter()
            .filter(|(l, _)| *l == label)
            .map(|(_, p)| *p)
            .sum()
    }
}

/// Born-rule outcome probabilities `p_k = Tr(rho E_k)` for an operator set.
pub fn outcome_distribution(
    ops: &MeasurementOperatorSet,
    rho: &DensityMatrix,
) -> Result<OutcomeDistribution> {
    let raw = ops
        .elements()
        .iter()
        .map(|(label, op)| (*label, rho.matrix().product_trace_re(op)))
        .collect();
    OutcomeDistribution::new(raw)
}

/// Draws one outcome by inverse-CDF sampling; consumes exactly one
/// uniform variate from `rng`, so a fixed stream yields a fixed sequence.
pub fn sample_outcome<R: Rng + ?Sized>(dist: &OutcomeDistribution, rng: &mut R) -> Outcome {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    for (label, p) in &dist.entries {
        cumulative += p;
        if u < cumulative {
            return *label;
        }
    }
    // Residual rounding mass lands on the final label.
    dist.entries.last().expect("non-empty by construction").0
}
