//! Which-way information calculus: fringe visibility, per-outcome guessing
//! likelihood, the eigenbasis readout that is optimal when the detector is
//! read out first, and duality-relation residuals.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hilbert::{
    eig_hermitian, inner, DensityOperator, Ket, MeasurementBasis, Operator,
};
use crate::interferometer::{quanton_probability, PhaseShift, QuantonOutcome, WwdPair};

/// Readout outcomes with weight below this threshold are skipped; their
/// guessing chance is a 0/0 expression and they contribute nothing to the
/// weighted likelihood.
pub const WEIGHT_EPS: f64 = 1e-14;

/// Tolerance on the total weight captured by a readout basis.
pub const BASIS_COMPLETENESS_TOL: f64 = 1e-10;

/// One readout outcome: the chance of guessing the path correctly when this
/// outcome fires, and the probability that it fires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeContribution {
    pub likelihood: f64,
    pub weight: f64,
}

/// Weighted guessing statistics for one readout basis against one detector
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodReport {
    /// Contributions of the outcomes with non-negligible weight.
    pub per_outcome: Vec<OutcomeContribution>,
    /// `L = Σ_j L_j w_j ∈ [1/2, 1]`.
    pub total_likelihood: f64,
    /// `2 L − 1 ∈ [0, 1]`: the distinguishability scale of the likelihood.
    pub d_value: f64,
}

/// Fringe visibility of the interference pattern, `V = |αa* αb| = |⟨χa|χb⟩|`.
pub fn visibility(wwd: &WwdPair) -> f64 {
    wwd.overlap().norm()
}

/// Estimates the visibility operationally from the interference pattern:
/// scans the port-a probability over a uniform phase grid and returns
/// `(P_max − P_min) / (P_max + P_min)`.
pub fn estimate_visibility_from_pattern(wwd: &WwdPair, grid_size: usize) -> f64 {
    assert!(grid_size >= 8, "pattern scan needs at least 8 grid points");
    let mut p_max = f64::NEG_INFINITY;
    let mut p_min = f64::INFINITY;
    for k in 0..grid_size {
        let ps = PhaseShift::new(TAU * k as f64 / grid_size as f64);
        let p = quanton_probability(wwd, ps, QuantonOutcome::PortA);
        p_max = p_max.max(p);
        p_min = p_min.min(p);
    }
    (p_max - p_min) / (p_max + p_min)
}

/// Chance of guessing the path correctly given that the detector readout
/// fired on `outcome`:
///
/// ```text
/// L_j = max(|⟨χa|χj⟩|², |⟨χb|χj⟩|²) / (|⟨χa|χj⟩|² + |⟨χb|χj⟩|²) ∈ [1/2, 1].
/// ```
pub fn outcome_likelihood(wwd: &WwdPair, outcome: &Ket) -> Result<f64> {
    let p_a = inner(&wwd.chi_a(), outcome)?.norm_sqr();
    let p_b = inner(&wwd.chi_b(), outcome)?.norm_sqr();
    let total = p_a + p_b;
    if total <= WEIGHT_EPS {
        return Err(Error::UndefinedOutcome);
    }
    Ok(p_a.max(p_b) / total)
}

/// Evaluates the guessing likelihood of a readout basis against a detector
/// state: outcome weights are `⟨χj|ρ_D|χj⟩` and the basis must capture the
/// detector support within [`BASIS_COMPLETENESS_TOL`].
///
/// Outcomes that cannot fire on the path support are skipped: those with
/// weight below [`WEIGHT_EPS`], and those whose overlaps with both `|χa⟩`
/// and `|χb⟩` are numerically zero (the guessing chance is a 0/0 expression
/// either way, and the weight of such an outcome is itself rounding noise).
pub fn likelihood(
    wwd: &WwdPair,
    basis: &MeasurementBasis,
    detector: &DensityOperator,
) -> Result<LikelihoodReport> {
    let weights: Vec<f64> = basis
        .vectors()
        .iter()
        .map(|v| detector.weight(v))
        .collect::<Result<_>>()?;
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum < 1.0 - BASIS_COMPLETENESS_TOL {
        return Err(Error::IncompleteBasis { weight_sum });
    }

    let mut per_outcome = Vec::with_capacity(basis.len());
    let mut total_likelihood = 0.0;
    for (vector, &weight) in basis.vectors().iter().zip(&weights) {
        if weight < WEIGHT_EPS {
            continue;
        }
        let likelihood = match outcome_likelihood(wwd, vector) {
            Ok(value) => value,
            Err(Error::UndefinedOutcome) => continue,
            Err(other) => return Err(other),
        };
        total_likelihood += likelihood * weight;
        per_outcome.push(OutcomeContribution { likelihood, weight });
    }

    Ok(LikelihoodReport {
        per_outcome,
        total_likelihood,
        d_value: 2.0 * total_likelihood - 1.0,
    })
}

/// The Hermitian path-information operator `ρ = |χa⟩⟨χa| − |χb⟩⟨χb|` whose
/// eigenbasis is the optimal readout when the detector is measured first.
pub fn englert_operator(wwd: &WwdPair) -> Operator {
    wwd.chi_a()
        .projector()
        .sub(&wwd.chi_b().projector())
        .expect("projector dims match")
}

/// The optimal readout basis for the detector-first order: the eigenbasis of
/// [`englert_operator`], eigenvalues descending. For identical detector
/// states the operator vanishes and the natural basis is returned.
pub fn englert_basis(wwd: &WwdPair) -> MeasurementBasis {
    let (_, basis) =
        eig_hermitian(&englert_operator(wwd)).expect("englert operator is Hermitian");
    basis
}

/// Distinguishability available when the detector is read out first:
/// `D = ½ tr|ρ| = √(1 − |⟨χa|χb⟩|²)`.
pub fn englert_distinguishability(wwd: &WwdPair) -> f64 {
    (1.0 - wwd.overlap().norm_sqr()).max(0.0).sqrt()
}

/// `d² + v² − 1`: positive values violate the duality bound `D² + V² ≤ 1`.
pub fn duality_residual(d: f64, v: f64) -> f64 {
    d * d + v * v - 1.0
}
