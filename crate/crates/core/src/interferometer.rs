//! The quanton-detector pipeline: beam splitter, phase shifter, which-way
//! detector interaction, beam merger, and the detector states seen by the
//! two measurement orders.
//!
//! Joint kets live in the 6-dimensional product space with quanton-major
//! indexing: `index = 3 q + d`, where `q ∈ {a, b} → {0, 1}` labels the
//! quanton mode and `d ∈ {0, +, −} → {0, 1, 2}` the natural detector basis.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{DensityOperator, Ket, Operator};

/// Outcome probabilities below this threshold are treated as the analytic
/// zero of the dark fringe; the detector projection is undefined there.
pub const PROBABILITY_EPS: f64 = 1e-14;

/// The two conditional detector states in the natural basis
/// `{|0⟩, |+⟩, |−⟩}`:
///
/// ```text
/// |χa⟩ = αa|0⟩ + βa|+⟩,    |χb⟩ = αb|0⟩ + βb|−⟩.
/// ```
///
/// `|0⟩` carries the overlapping part of the two states, `|±⟩` the parts
/// unique to one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwdPair {
    alpha_a: Complex64,
    beta_a: Complex64,
    alpha_b: Complex64,
    beta_b: Complex64,
}

impl WwdPair {
    /// Builds a pair from natural-basis amplitudes; each arm must be
    /// normalized within `1e-12`.
    pub fn new(
        alpha_a: Complex64,
        beta_a: Complex64,
        alpha_b: Complex64,
        beta_b: Complex64,
    ) -> Result<Self> {
        for (alpha, beta) in [(alpha_a, beta_a), (alpha_b, beta_b)] {
            let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
            if (norm_sqr - 1.0).abs() > 1e-12 {
                return Err(Error::NotNormalized { norm_sqr });
            }
        }
        Ok(Self {
            alpha_a,
            beta_a,
            alpha_b,
            beta_b,
        })
    }

    /// The symmetric detector pair with `|⟨χa|χb⟩| = visibility`, realized by
    /// identical independent devices in each arm. All four amplitudes are
    /// real non-negative; any phase on them is absorbable into the phase
    /// shift or the definition of `|±⟩`.
    pub fn symmetric(visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) || visibility.is_nan() {
            return Err(Error::OutOfRange {
                name: "visibility",
                value: visibility,
                min: 0.0,
                max: 1.0,
            });
        }
        let alpha = Complex64::new(visibility.sqrt(), 0.0);
        let beta = Complex64::new((1.0 - visibility).sqrt(), 0.0);
        Self::new(alpha, beta, alpha, beta)
    }

    pub fn alpha_a(&self) -> Complex64 {
        self.alpha_a
    }

    pub fn beta_a(&self) -> Complex64 {
        self.beta_a
    }

    pub fn alpha_b(&self) -> Complex64 {
        self.alpha_b
    }

    pub fn beta_b(&self) -> Complex64 {
        self.beta_b
    }

    /// `|χa⟩` as a detector ket.
    pub fn chi_a(&self) -> Ket {
        Ket::from_normalized_unchecked(vec![self.alpha_a, self.beta_a, Complex64::ZERO])
    }

    /// `|χb⟩` as a detector ket.
    pub fn chi_b(&self) -> Ket {
        Ket::from_normalized_unchecked(vec![self.alpha_b, Complex64::ZERO, self.beta_b])
    }

    /// `⟨χa|χb⟩ = αa* αb`.
    pub fn overlap(&self) -> Complex64 {
        self.alpha_a.conj() * self.alpha_b
    }
}

/// Relative phase between the two interferometer arms, reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShift {
    delta: f64,
}

impl PhaseShift {
    pub fn new(delta: f64) -> Self {
        assert!(delta.is_finite(), "phase shift must be finite");
        let mut reduced = delta.rem_euclid(TAU);
        if reduced >= TAU {
            reduced = 0.0;
        }
        Self { delta: reduced }
    }

    /// The grid point `2π k / steps`.
    pub fn grid_point(index: usize, steps: usize) -> Self {
        assert!(steps > 0 && index < steps);
        Self::new(TAU * index as f64 / steps as f64)
    }

    pub fn radians(&self) -> f64 {
        self.delta
    }

    /// `e^{iδ}`.
    pub fn phase_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.delta)
    }
}

/// Which output port the quanton was found in when it is measured first:
/// `σ = +1` for `|ψa⟩`, `σ = −1` for `|ψb⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantonOutcome {
    PortA,
    PortB,
}

impl QuantonOutcome {
    pub const BOTH: [QuantonOutcome; 2] = [QuantonOutcome::PortA, QuantonOutcome::PortB];

    pub fn sigma(&self) -> i32 {
        match self {
            QuantonOutcome::PortA => 1,
            QuantonOutcome::PortB => -1,
        }
    }

    pub fn sign(&self) -> f64 {
        f64::from(self.sigma())
    }

    pub fn from_sigma(sigma: i32) -> Option<Self> {
        match sigma {
            1 => Some(QuantonOutcome::PortA),
            -1 => Some(QuantonOutcome::PortB),
            _ => None,
        }
    }

    fn quanton_index(&self) -> usize {
        match self {
            QuantonOutcome::PortA => 0,
            QuantonOutcome::PortB => 1,
        }
    }
}

fn require_joint_dim(joint: &Ket) -> Result<()> {
    if joint.dim() != 6 {
        return Err(Error::DimensionMismatch {
            left: joint.dim(),
            right: 6,
        });
    }
    Ok(())
}

/// `|ψa⟩ ⊗ |χ^(i)⟩`: the quanton enters in mode a, the detector in its
/// initial state `|0⟩`.
pub fn initial_joint_state() -> Ket {
    Ket::basis_state(6, 0)
}

fn apply_quanton_hadamard(joint: &Ket) -> Result<Ket> {
    require_joint_dim(joint)?;
    let amps = joint.amplitudes();
    let mut out = vec![Complex64::ZERO; 6];
    for d in 0..3 {
        out[d] = (amps[d] + amps[3 + d]) / SQRT_2;
        out[3 + d] = (amps[d] - amps[3 + d]) / SQRT_2;
    }
    Ok(Ket::from_normalized_unchecked(out))
}

/// The 50:50 beam splitter: a Hadamard gate on the quanton mode.
pub fn apply_beam_splitter(joint: &Ket) -> Result<Ket> {
    apply_quanton_hadamard(joint)
}

/// The beam merger: a second Hadamard gate on the quanton mode.
pub fn apply_beam_merger(joint: &Ket) -> Result<Ket> {
    apply_quanton_hadamard(joint)
}

/// The relative phase shift: multiplies the `|ψb⟩` branch by `e^{iδ}`.
pub fn apply_phase_shift(joint: &Ket, ps: PhaseShift) -> Result<Ket> {
    require_joint_dim(joint)?;
    let factor = ps.phase_factor();
    let mut out = joint.amplitudes().to_vec();
    for d in 0..3 {
        out[3 + d] *= factor;
    }
    Ok(Ket::from_normalized_unchecked(out))
}

/// The which-way interaction: the detector, still in its initial state,
/// is transferred into `|χa⟩` on path a and `|χb⟩` on path b without
/// changing the quanton.
pub fn apply_wwd(joint: &Ket, wwd: &WwdPair) -> Result<Ket> {
    require_joint_dim(joint)?;
    let amps = joint.amplitudes();
    let disturbed: f64 = [1, 2, 4, 5].iter().map(|&i| amps[i].norm_sqr()).sum();
    if disturbed > 1e-24 {
        return Err(Error::DetectorAlreadyCoupled);
    }
    let chi_a = wwd.chi_a();
    let chi_b = wwd.chi_b();
    let mut out = vec![Complex64::ZERO; 6];
    for d in 0..3 {
        out[d] = amps[0] * chi_a.amplitude(d);
        out[3 + d] = amps[3] * chi_b.amplitude(d);
    }
    Ok(Ket::from_normalized_unchecked(out))
}

/// Runs the full pipeline BS → PS → WWD → BM on `|ψa⟩ ⊗ |χ^(i)⟩` and returns
/// the normalized joint state
///
/// ```text
/// |Ψ^(f)⟩ = [|ψa⟩(|χa⟩ + e^{iδ}|χb⟩) + |ψb⟩(|χa⟩ − e^{iδ}|χb⟩)] / 2.
/// ```
pub fn final_joint_state(wwd: &WwdPair, ps: PhaseShift) -> Ket {
    let state = initial_joint_state();
    let state = apply_beam_splitter(&state).expect("pipeline state has dim 6");
    let state = apply_phase_shift(&state, ps).expect("pipeline state has dim 6");
    let state = apply_wwd(&state, wwd).expect("detector is still in its initial state");
    let state = apply_beam_merger(&state).expect("pipeline state has dim 6");
    Ket::new(state.amplitudes().to_vec()).expect("pipeline output has unit norm")
}

/// Probability of finding the quanton in the given output port:
/// `P(σ) = ‖|χa⟩ + σ e^{iδ}|χb⟩‖² / 4 = (1 + σ Re(e^{iδ}⟨χa|χb⟩)) / 2`.
pub fn quanton_probability(wwd: &WwdPair, ps: PhaseShift, out: QuantonOutcome) -> f64 {
    let interference = (ps.phase_factor() * wwd.overlap()).re;
    0.5 * (1.0 + out.sign() * interference)
}

/// Detector state when the WWD is read out before the quanton:
/// the quanton is traced out of `|Ψ^(f)⟩⟨Ψ^(f)|`, leaving
/// `ρ_D = (|χa⟩⟨χa| + |χb⟩⟨χb|) / 2` independent of δ.
pub fn detector_state_wwd_first(wwd: &WwdPair) -> DensityOperator {
    let op: Operator = wwd
        .chi_a()
        .projector()
        .add(&wwd.chi_b().projector())
        .expect("projector dims match")
        .scaled(0.5);
    DensityOperator::new(op).expect("mixture of unit projectors is a density operator")
}

/// Detector state after the quanton has been found in `out`: the projected
/// pure state
///
/// ```text
/// |χ^(f)⟩ ∝ (αa + σ e^{iδ} αb)|0⟩ + βa|+⟩ + σ e^{iδ} βb|−⟩
/// ```
///
/// and the probability of that outcome (identical to
/// [`quanton_probability`]). The probability-weighted mixture over both
/// outcomes reproduces [`detector_state_wwd_first`].
pub fn detector_state_quanton_first(
    wwd: &WwdPair,
    ps: PhaseShift,
    out: QuantonOutcome,
) -> Result<(Ket, f64)> {
    let probability = quanton_probability(wwd, ps, out);
    if probability < PROBABILITY_EPS {
        return Err(Error::ZeroProbabilityOutcome { probability });
    }
    let joint = final_joint_state(wwd, ps);
    let offset = 3 * out.quanton_index();
    let branch = joint.amplitudes()[offset..offset + 3].to_vec();
    let (ket, _) = Ket::new_with_weight(branch)?;
    Ok((ket, probability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{inner, partial_trace_quanton};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn symmetric_pair_extremes() {
        let empty = WwdPair::symmetric(1.0).unwrap();
        assert_eq!(empty.alpha_a(), Complex64::ONE);
        assert_eq!(empty.beta_a(), Complex64::ZERO);
        assert_eq!(empty.alpha_b(), Complex64::ONE);
        assert_eq!(empty.beta_b(), Complex64::ZERO);

        let perfect = WwdPair::symmetric(0.0).unwrap();
        assert_eq!(perfect.alpha_a(), Complex64::ZERO);
        assert_eq!(perfect.beta_a(), Complex64::ONE);
        assert_abs_diff_eq!(perfect.overlap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_pair_half_visibility() {
        let wwd = WwdPair::symmetric(0.5).unwrap();
        let expected = 0.5f64.sqrt();
        assert_abs_diff_eq!(wwd.alpha_a().re, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(wwd.beta_b().re, expected, epsilon = 1e-15);
        let ip = inner(&wwd.chi_a(), &wwd.chi_b()).unwrap();
        assert_abs_diff_eq!(ip.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_rejects_out_of_range() {
        assert!(matches!(
            WwdPair::symmetric(1.2),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            WwdPair::symmetric(-0.1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn phase_shift_reduces_range() {
        assert_abs_diff_eq!(PhaseShift::new(TAU + 1.0).radians(), 1.0, epsilon = 1e-15);
        assert!(PhaseShift::new(-0.5).radians() >= 0.0);
        assert!(PhaseShift::new(-0.5).radians() < TAU);
        assert_eq!(PhaseShift::new(TAU).radians(), 0.0);
        assert_eq!(PhaseShift::new(PI).radians(), PI);
    }

    #[test]
    fn empty_wwd_balanced_interferometer_is_exact() {
        // Perfect constructive interference back into port a, bit-exact.
        let wwd = WwdPair::symmetric(1.0).unwrap();
        let joint = final_joint_state(&wwd, PhaseShift::new(0.0));
        assert_eq!(joint.amplitude(0), Complex64::ONE);
        for i in 1..6 {
            assert_eq!(joint.amplitude(i), Complex64::ZERO);
        }
    }

    #[test]
    fn double_hadamard_returns_bare_quanton_exactly() {
        let split = apply_beam_splitter(&initial_joint_state()).unwrap();
        let merged = apply_beam_merger(&split).unwrap();
        let normalized = Ket::new(merged.amplitudes().to_vec()).unwrap();
        assert_eq!(normalized, initial_joint_state());
    }

    #[test]
    fn pipeline_matches_hand_expanded_closed_form() {
        // (chi_a + e^{i delta} chi_b)/2 on port a, (chi_a - e^{i delta} chi_b)/2 on port b.
        let wwd = WwdPair::symmetric(0.62).unwrap();
        for k in 0..9 {
            let ps = PhaseShift::new(0.8 * k as f64);
            let joint = final_joint_state(&wwd, ps);
            let phase = ps.phase_factor();
            let chi_a = wwd.chi_a();
            let chi_b = wwd.chi_b();
            for d in 0..3 {
                let plus = (chi_a.amplitude(d) + phase * chi_b.amplitude(d)) * 0.5;
                let minus = (chi_a.amplitude(d) - phase * chi_b.amplitude(d)) * 0.5;
                assert!((joint.amplitude(d) - plus).norm() < 1e-13);
                assert!((joint.amplitude(3 + d) - minus).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn empty_wwd_dark_fringe_sends_quanton_to_port_b() {
        let wwd = WwdPair::symmetric(1.0).unwrap();
        let joint = final_joint_state(&wwd, PhaseShift::new(PI));
        assert_abs_diff_eq!(joint.amplitude(3).norm_sqr(), 1.0, epsilon = 1e-12);
        assert!(joint.amplitude(0).norm_sqr() < 1e-12);
    }

    #[test]
    fn perfect_wwd_gives_quarter_probabilities() {
        let wwd = WwdPair::symmetric(0.0).unwrap();
        for k in 0..7 {
            let joint = final_joint_state(&wwd, PhaseShift::new(0.9 * k as f64));
            // (psi_a, +), (psi_a, -), (psi_b, +), (psi_b, -) all carry 1/4.
            for idx in [1usize, 2, 4, 5] {
                assert_abs_diff_eq!(joint.amplitude(idx).norm_sqr(), 0.25, epsilon = 1e-14);
            }
            for idx in [0usize, 3] {
                assert!(joint.amplitude(idx).norm_sqr() < 1e-28);
            }
        }
    }

    #[test]
    fn quanton_probability_examples() {
        let dark = quanton_probability(
            &WwdPair::symmetric(1.0).unwrap(),
            PhaseShift::new(PI),
            QuantonOutcome::PortA,
        );
        assert!(dark.abs() < 1e-12);

        for delta in [0.0, 1.0, 2.5] {
            let p = quanton_probability(
                &WwdPair::symmetric(0.0).unwrap(),
                PhaseShift::new(delta),
                QuantonOutcome::PortA,
            );
            assert_abs_diff_eq!(p, 0.5, epsilon = 1e-14);
        }

        let bright = quanton_probability(
            &WwdPair::symmetric(0.5).unwrap(),
            PhaseShift::new(0.0),
            QuantonOutcome::PortA,
        );
        assert_abs_diff_eq!(bright, 0.75, epsilon = 1e-14);
    }

    #[test]
    fn quanton_probabilities_sum_to_one() {
        for v_step in 0..=20 {
            let wwd = WwdPair::symmetric(v_step as f64 / 20.0).unwrap();
            for k in 0..50 {
                let ps = PhaseShift::grid_point(k, 50);
                let total = quanton_probability(&wwd, ps, QuantonOutcome::PortA)
                    + quanton_probability(&wwd, ps, QuantonOutcome::PortB);
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn probability_matches_cosine_form() {
        // P(sigma) = (1 + sigma V cos delta) / 2 for the symmetric pair.
        for &v in &[0.0, 0.3, 0.5, 0.9, 1.0] {
            let wwd = WwdPair::symmetric(v).unwrap();
            for k in 0..21 {
                let delta = TAU * k as f64 / 21.0;
                for out in QuantonOutcome::BOTH {
                    let p = quanton_probability(&wwd, PhaseShift::new(delta), out);
                    let expected = 0.5 * (1.0 + out.sign() * v * delta.cos());
                    assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn probability_matches_pipeline_branch_norm() {
        // The closed form equals the squared norm of the corresponding
        // branch of the pipeline output.
        for &v in &[0.0, 0.4, 0.77, 1.0] {
            let wwd = WwdPair::symmetric(v).unwrap();
            for k in 0..17 {
                let ps = PhaseShift::new(TAU * k as f64 / 17.0);
                let joint = final_joint_state(&wwd, ps);
                for out in QuantonOutcome::BOTH {
                    let offset = 3 * out.quanton_index();
                    let branch_norm: f64 = (offset..offset + 3)
                        .map(|i| joint.amplitude(i).norm_sqr())
                        .sum();
                    let p = quanton_probability(&wwd, ps, out);
                    assert_abs_diff_eq!(p, branch_norm, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn wwd_first_detector_state_examples() {
        let perfect = detector_state_wwd_first(&WwdPair::symmetric(0.0).unwrap());
        let expected = Operator::diagonal(&[0.0, 0.5, 0.5]);
        assert!(perfect.operator().max_abs_diff(&expected).unwrap() < 1e-15);

        let empty = detector_state_wwd_first(&WwdPair::symmetric(1.0).unwrap());
        let pure = Ket::basis_state(3, 0).projector();
        assert!(empty.operator().max_abs_diff(&pure).unwrap() < 1e-15);
    }

    #[test]
    fn wwd_first_state_matches_partial_trace() {
        let wwd = WwdPair::symmetric(0.5).unwrap();
        let direct = detector_state_wwd_first(&wwd);
        for k in 0..8 {
            let joint = final_joint_state(&wwd, PhaseShift::new(0.7 * k as f64));
            let traced = partial_trace_quanton(&joint).unwrap();
            assert!(direct.operator().max_abs_diff(traced.operator()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn quanton_first_dark_fringe_projection() {
        // At delta = pi the |0> component cancels; the remaining state is
        // proportional to |+> - |-> with outcome probability 1/4.
        let wwd = WwdPair::symmetric(0.5).unwrap();
        let (state, probability) =
            detector_state_quanton_first(&wwd, PhaseShift::new(PI), QuantonOutcome::PortA)
                .unwrap();
        assert!(state.amplitude(0).norm() < 1e-15);
        assert_abs_diff_eq!(probability, 0.25, epsilon = 1e-14);
        let h = 0.5f64.sqrt();
        let target = Ket::new(vec![r(0.0), r(h), r(-h)]).unwrap();
        assert_abs_diff_eq!(inner(&target, &state).unwrap().norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quanton_first_bright_fringe_projection() {
        let wwd = WwdPair::symmetric(0.5).unwrap();
        let (state, probability) =
            detector_state_quanton_first(&wwd, PhaseShift::new(0.0), QuantonOutcome::PortA)
                .unwrap();
        assert_abs_diff_eq!(probability, 0.75, epsilon = 1e-14);
        let n = 3.0f64.sqrt();
        let target = Ket::new(vec![
            r(2.0f64.sqrt() / n),
            r(0.5f64.sqrt() / n),
            r(0.5f64.sqrt() / n),
        ])
        .unwrap();
        assert_abs_diff_eq!(inner(&target, &state).unwrap().norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quanton_first_no_signal_errors() {
        let wwd = WwdPair::symmetric(1.0).unwrap();
        let result = detector_state_quanton_first(&wwd, PhaseShift::new(PI), QuantonOutcome::PortA);
        assert!(matches!(
            result,
            Err(Error::ZeroProbabilityOutcome { .. })
        ));
    }

    #[test]
    fn projection_probability_equals_quanton_probability() {
        let wwd = WwdPair::symmetric(0.73).unwrap();
        for k in 0..10 {
            let ps = PhaseShift::new(0.63 * k as f64);
            for out in QuantonOutcome::BOTH {
                let p_direct = quanton_probability(&wwd, ps, out);
                let (_, p_proj) = detector_state_quanton_first(&wwd, ps, out).unwrap();
                assert_eq!(p_direct, p_proj);
            }
        }
    }

    #[test]
    fn mixture_over_outcomes_reproduces_traced_state() {
        for &v in &[0.0, 0.3, 0.5, 0.9] {
            let wwd = WwdPair::symmetric(v).unwrap();
            for k in 0..10 {
                let ps = PhaseShift::grid_point(k, 10);
                let mut mixture = Operator::zeros(3);
                for out in QuantonOutcome::BOTH {
                    let (state, p) = detector_state_quanton_first(&wwd, ps, out).unwrap();
                    mixture = mixture.add(&state.projector().scaled(p)).unwrap();
                }
                let traced = detector_state_wwd_first(&wwd);
                assert!(mixture.max_abs_diff(traced.operator()).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_shift_commutes_with_wwd_interaction() {
        let wwd = WwdPair::symmetric(0.42).unwrap();
        for k in 0..12 {
            let ps = PhaseShift::new(0.55 * k as f64);
            let split = apply_beam_splitter(&initial_joint_state()).unwrap();

            let ps_first = apply_wwd(&apply_phase_shift(&split, ps).unwrap(), &wwd).unwrap();
            let wwd_first = apply_phase_shift(&apply_wwd(&split, &wwd).unwrap(), ps).unwrap();

            for i in 0..6 {
                let diff = (ps_first.amplitude(i) - wwd_first.amplitude(i)).norm();
                assert!(diff < 1e-12, "stage order changed the state by {diff}");
            }
        }
    }

    #[test]
    fn wwd_stage_rejects_coupled_detector() {
        let wwd = WwdPair::symmetric(0.5).unwrap();
        let coupled = final_joint_state(&wwd, PhaseShift::new(1.0));
        assert!(matches!(
            apply_wwd(&coupled, &wwd),
            Err(Error::DetectorAlreadyCoupled)
        ));
    }
}
