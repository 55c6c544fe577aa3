//! The numeric invariant suite behind `duality verify`: every check
//! measures a residual and compares it against its stated tolerance.
//! Order-type checks (dominance, monotonicity) report a signed residual
//! that must be non-positive.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use duality_core::hilbert::{
    eig_hermitian, haar_random_basis, inner, partial_trace_quanton, trace_norm_half,
    DensityOperator, Ket, MeasurementBasis, Operator,
};
use duality_core::interferometer::{
    apply_beam_merger, apply_beam_splitter, apply_phase_shift, apply_wwd,
    detector_state_quanton_first, detector_state_wwd_first, final_joint_state,
    initial_joint_state, quanton_probability, PhaseShift, QuantonOutcome, WwdPair,
};
use duality_core::optimizer::{
    optimize_distinguishability, run_scan, substream_seed, ScanConfig, ScanRecord,
};
use duality_core::whichway::{
    duality_residual, englert_basis, englert_distinguishability, englert_operator, likelihood,
};

use crate::output::{csv_row, parse_csv_row};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn check(name: &'static str, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name,
        residual,
        tolerance,
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn random_unit_ket(rng: &mut ChaCha8Rng, dim: usize) -> Ket {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if let Ok(ket) = Ket::new(amps) {
            return ket;
        }
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let mut m = Operator::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn visibility_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn ket_normalization(seed: u64) -> CheckResult {
    let mut residual = 0.0f64;
    let mut push = |ket: &Ket| {
        let dev = (ket.norm_sqr() - 1.0).abs();
        if dev > residual {
            residual = dev;
        }
    };
    for v_step in 0..=10 {
        let wwd = WwdPair::symmetric(v_step as f64 / 10.0).unwrap();
        push(&wwd.chi_a());
        push(&wwd.chi_b());
        for k in 0..20 {
            let ps = PhaseShift::grid_point(k, 20);
            push(&final_joint_state(&wwd, ps));
            for out in QuantonOutcome::BOTH {
                if let Ok((state, _)) = detector_state_quanton_first(&wwd, ps, out) {
                    push(&state);
                }
            }
        }
        for vector in englert_basis(&wwd).vectors() {
            push(vector);
        }
    }
    let mut rng = rng_for(seed, 1);
    for _ in 0..200 {
        for vector in haar_random_basis(&mut rng, 3).unwrap().vectors() {
            push(vector);
        }
    }
    check("ket-normalization", residual, 1e-12)
}

fn eig_reconstruction(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 2);
    let mut matrices: Vec<Operator> = (0..200).map(|_| random_hermitian(&mut rng, 3)).collect();
    matrices.push(Operator::zeros(3));
    matrices.push(Operator::diagonal(&[1.0, -1.0, 0.0]));
    for &v in &[0.0, 0.5, 1.0] {
        matrices.push(englert_operator(&WwdPair::symmetric(v).unwrap()));
    }
    let mut residual = 0.0f64;
    for m in &matrices {
        let (values, basis) = eig_hermitian(m).unwrap();
        let mut reconstruction = Operator::zeros(3);
        for (value, vector) in values.iter().zip(basis.vectors()) {
            reconstruction = reconstruction.add(&vector.projector().scaled(*value)).unwrap();
        }
        residual = residual.max(reconstruction.max_abs_diff(m).unwrap());
    }
    check("eig-reconstruction", residual, 1e-9)
}

fn partial_trace_preserves_trace(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 3);
    let mut residual = 0.0f64;
    for _ in 0..500 {
        let joint = random_unit_ket(&mut rng, 6);
        let rho = partial_trace_quanton(&joint).unwrap();
        let trace = rho.operator().trace();
        residual = residual
            .max((trace.re - joint.norm_sqr()).abs())
            .max(trace.im.abs());
    }
    check("partial-trace-preserves-trace", residual, 1e-12)
}

fn haar_orthonormality(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 4);
    let mut residual = 0.0f64;
    for _ in 0..1000 {
        let basis = haar_random_basis(&mut rng, 3).unwrap();
        residual = residual.max(basis.orthonormality_deviation());
    }
    check("haar-orthonormality", residual, 1e-10)
}

fn trace_norm_duality_identity() -> CheckResult {
    let mut residual = 0.0f64;
    for v in visibility_grid(20) {
        let wwd = WwdPair::symmetric(v).unwrap();
        let direct = trace_norm_half(&englert_operator(&wwd)).unwrap();
        let closed = (1.0 - wwd.overlap().norm_sqr()).max(0.0).sqrt();
        residual = residual.max((direct - closed).abs());
    }
    check("trace-norm-duality-identity", residual, 1e-10)
}

fn outcome_probability_normalization() -> CheckResult {
    let mut residual = 0.0f64;
    for v in visibility_grid(20) {
        let wwd = WwdPair::symmetric(v).unwrap();
        for k in 0..50 {
            let ps = PhaseShift::grid_point(k, 50);
            let total = quanton_probability(&wwd, ps, QuantonOutcome::PortA)
                + quanton_probability(&wwd, ps, QuantonOutcome::PortB);
            residual = residual.max((total - 1.0).abs());
        }
    }
    check("outcome-probability-normalization", residual, 1e-12)
}

fn detector_mixture_identity() -> CheckResult {
    let mut residual = 0.0f64;
    for v_step in 0..10 {
        let wwd = WwdPair::symmetric(v_step as f64 / 10.0).unwrap();
        let traced = detector_state_wwd_first(&wwd);
        for k in 0..10 {
            let ps = PhaseShift::grid_point(k, 10);
            let mut mixture = Operator::zeros(3);
            for out in QuantonOutcome::BOTH {
                let (state, p) = detector_state_quanton_first(&wwd, ps, out).unwrap();
                mixture = mixture.add(&state.projector().scaled(p)).unwrap();
            }
            residual = residual.max(mixture.max_abs_diff(traced.operator()).unwrap());
        }
    }
    check("detector-mixture-identity", residual, 1e-12)
}

fn phase_wwd_commutation() -> CheckResult {
    let mut residual = 0.0f64;
    for v_step in 0..7 {
        let wwd = WwdPair::symmetric(v_step as f64 / 6.0).unwrap();
        for k in 0..9 {
            let ps = PhaseShift::grid_point(k, 9);
            let split = apply_beam_splitter(&initial_joint_state()).unwrap();
            let ps_first = apply_wwd(&apply_phase_shift(&split, ps).unwrap(), &wwd).unwrap();
            let wwd_first = apply_phase_shift(&apply_wwd(&split, &wwd).unwrap(), ps).unwrap();
            for i in 0..6 {
                residual =
                    residual.max((ps_first.amplitude(i) - wwd_first.amplitude(i)).norm());
            }
        }
    }
    check("phase-wwd-commutation", residual, 1e-12)
}

fn double_hadamard_identity() -> CheckResult {
    let split = apply_beam_splitter(&initial_joint_state()).unwrap();
    let merged = apply_beam_merger(&split).unwrap();
    let normalized = Ket::new(merged.amplitudes().to_vec()).unwrap();
    let expected = initial_joint_state();
    let mut residual = 0.0f64;
    for i in 0..6 {
        residual = residual.max((normalized.amplitude(i) - expected.amplitude(i)).norm());
    }
    check("double-hadamard-identity", residual, 0.0)
}

fn likelihood_ranges(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 5);
    let mut residual: f64 = f64::NEG_INFINITY;
    for case in 0..500 {
        let v: f64 = rng.random_range(0.0..=1.0);
        let wwd = WwdPair::symmetric(v).unwrap();
        let ps = PhaseShift::new(rng.random_range(0.0..TAU));
        let out = if rng.random_range(0..2) == 0 {
            QuantonOutcome::PortA
        } else {
            QuantonOutcome::PortB
        };
        let detector = if case % 2 == 0 {
            detector_state_wwd_first(&wwd)
        } else {
            match detector_state_quanton_first(&wwd, ps, out) {
                Ok((state, _)) => DensityOperator::pure(&state),
                Err(_) => continue,
            }
        };
        let basis = haar_random_basis(&mut rng, 3).unwrap();
        let report = likelihood(&wwd, &basis, &detector).unwrap();
        for outcome in &report.per_outcome {
            residual = residual
                .max(0.5 - outcome.likelihood)
                .max(outcome.likelihood - 1.0);
        }
        residual = residual
            .max(0.5 - report.total_likelihood)
            .max(report.total_likelihood - 1.0)
            .max(-report.d_value)
            .max(report.d_value - 1.0);
    }
    check("likelihood-ranges", residual, 1e-12)
}

/// Extends an orthonormal basis of span{chi_a, chi_b} by the orthogonal
/// complement and checks that the extension leaves the likelihood unchanged.
fn basis_completion_invariance(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 6);
    let mut residual = 0.0f64;
    for _ in 0..100 {
        let v: f64 = rng.random_range(0.05..0.95);
        let wwd = WwdPair::symmetric(v).unwrap();
        let chi_a = wwd.chi_a();
        let chi_b = wwd.chi_b();

        // Gram-Schmidt inside the span.
        let overlap = inner(&chi_a, &chi_b).unwrap();
        let reduced: Vec<Complex64> = chi_b
            .amplitudes()
            .iter()
            .zip(chi_a.amplitudes())
            .map(|(b, a)| b - overlap * a)
            .collect();
        let span_2 = Ket::new(reduced).unwrap();

        // Orthogonal complement via the conjugated cross product.
        let u = chi_a.amplitudes();
        let w = span_2.amplitudes();
        let off = Ket::new(vec![
            (u[1] * w[2] - u[2] * w[1]).conj(),
            (u[2] * w[0] - u[0] * w[2]).conj(),
            (u[0] * w[1] - u[1] * w[0]).conj(),
        ])
        .unwrap();

        let spanning = MeasurementBasis::new(vec![chi_a.clone(), span_2.clone()]).unwrap();
        let completed = MeasurementBasis::new(vec![chi_a, span_2, off]).unwrap();

        let delta = PhaseShift::new(rng.random_range(0.0..TAU));
        let detectors = [
            detector_state_wwd_first(&wwd),
            DensityOperator::pure(
                &detector_state_quanton_first(&wwd, delta, QuantonOutcome::PortA)
                    .unwrap()
                    .0,
            ),
        ];
        for detector in &detectors {
            let small = likelihood(&wwd, &spanning, detector).unwrap();
            let full = likelihood(&wwd, &completed, detector).unwrap();
            residual = residual.max((small.total_likelihood - full.total_likelihood).abs());
        }
    }
    check("basis-completion-invariance", residual, 1e-12)
}

fn englert_optimality_sampling(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 7);
    let mut residual: f64 = f64::NEG_INFINITY;
    for &v in &[0.25, 0.5, 0.75, 0.9] {
        let wwd = WwdPair::symmetric(v).unwrap();
        let detector = detector_state_wwd_first(&wwd);
        let bound = englert_distinguishability(&wwd);
        for _ in 0..1000 {
            let basis = haar_random_basis(&mut rng, 3).unwrap();
            let report = likelihood(&wwd, &basis, &detector).unwrap();
            residual = residual.max(report.d_value - bound);
        }
    }
    check("englert-optimality-sampling", residual, 1e-9)
}

fn englert_anchor_delta_zero() -> CheckResult {
    let mut residual = 0.0f64;
    let ps = PhaseShift::new(0.0);
    for v in visibility_grid(20) {
        let wwd = WwdPair::symmetric(v).unwrap();
        let bound = (1.0 - v * v).max(0.0).sqrt();
        let basis = englert_basis(&wwd);
        for out in QuantonOutcome::BOTH {
            let Ok((state, _)) = detector_state_quanton_first(&wwd, ps, out) else {
                continue;
            };
            let detector = DensityOperator::pure(&state);
            let report = likelihood(&wwd, &basis, &detector).unwrap();
            residual = residual.max((report.d_value - bound).abs());
        }
    }
    check("englert-anchor-delta-zero", residual, 1e-10)
}

fn natural_basis_closed_form() -> CheckResult {
    let natural = MeasurementBasis::natural(3);
    let mut residual = 0.0f64;
    for &v in &[0.5, 0.9, 0.97] {
        let wwd = WwdPair::symmetric(v).unwrap();
        for k in 0..50 {
            let ps = PhaseShift::grid_point(k, 50);
            for out in QuantonOutcome::BOTH {
                let Ok((state, _)) = detector_state_quanton_first(&wwd, ps, out) else {
                    continue;
                };
                let detector = DensityOperator::pure(&state);
                let report = likelihood(&wwd, &natural, &detector).unwrap();
                let sigma = out.sign();
                let expected = 2.0 * (1.0 - v)
                    / (2.0 * v * (1.0 + sigma * ps.radians().cos()) + 2.0 * (1.0 - v));
                residual = residual.max((report.d_value - expected).abs());
            }
        }
    }
    check("natural-basis-closed-form", residual, 1e-12)
}

fn scan_dominance(scan: &[ScanRecord]) -> CheckResult {
    let mut residual: f64 = f64::NEG_INFINITY;
    for record in scan {
        let (Some(d_opt), Some(eng), Some(nat)) =
            (record.d_opt, record.d_englert_line, record.d_natural_line)
        else {
            continue;
        };
        residual = residual.max(eng.max(nat) - d_opt);
    }
    check("scan-dominance", residual, 0.0)
}

fn scan_englert_floor(scan: &[ScanRecord]) -> CheckResult {
    let mut residual: f64 = f64::NEG_INFINITY;
    for record in scan {
        if let Some(d_opt) = record.d_opt {
            residual = residual.max(record.d_englert_bound - d_opt);
        }
    }
    check("scan-englert-floor", residual, 1e-6)
}

fn scan_duality_violation(scan: &[ScanRecord]) -> CheckResult {
    let record = scan
        .iter()
        .find(|r| (r.visibility - 0.9).abs() < 1e-12 && (r.delta - std::f64::consts::PI).abs() < 1e-9)
        .expect("V = 0.9, delta = pi is on the default grid");
    let violation = duality_residual(record.d_opt.unwrap(), record.visibility);
    check("scan-duality-violation", 0.80 - violation, 0.0)
}

fn scan_sigma_symmetry(scan_a: &[ScanRecord], scan_b: &[ScanRecord], config: &ScanConfig) -> CheckResult {
    let steps = config.delta_steps;
    let mut residual = 0.0f64;
    for vi in 0..config.visibilities.len() {
        for k in 0..steps {
            let shifted = &scan_a[vi * steps + (k + steps / 2) % steps];
            let direct = &scan_b[vi * steps + k];
            if let (Some(a), Some(b)) = (shifted.d_opt, direct.d_opt) {
                residual = residual.max((a - b).abs());
            }
        }
    }
    check("scan-sigma-symmetry", residual, 5e-3)
}

fn optimize_monotone_in_samples(seed: u64) -> CheckResult {
    let wwd = WwdPair::symmetric(0.7).unwrap();
    let ps = PhaseShift::grid_point(7, 50);
    let mut residual: f64 = f64::NEG_INFINITY;
    let mut previous = f64::NEG_INFINITY;
    for samples in [100, 300, 1000, 3000] {
        let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, 0, 7));
        let (d_opt, _) =
            optimize_distinguishability(&wwd, ps, QuantonOutcome::PortA, samples, &mut rng)
                .unwrap();
        residual = residual.max(previous - d_opt);
        previous = d_opt;
    }
    check("optimize-monotone-in-samples", residual, 0.0)
}

fn csv_round_trip(scan: &[ScanRecord]) -> CheckResult {
    let mut probes: Vec<ScanRecord> = scan.iter().take(5).cloned().collect();
    probes.push(ScanRecord {
        delta: std::f64::consts::PI,
        visibility: 1.0,
        sigma: 1,
        outcome_probability: 0.0,
        d_opt: None,
        d_englert_line: None,
        d_natural_line: None,
        d_englert_bound: 0.0,
    });
    let ok = probes
        .iter()
        .all(|record| parse_csv_row(&csv_row(record)).as_ref() == Ok(record));
    check("csv-round-trip", if ok { 0.0 } else { 1.0 }, 0.0)
}

/// Runs every check; `tolerance_override`, when given, replaces each
/// check's default tolerance.
pub fn run_all(seed: u64, tolerance_override: Option<f64>) -> Vec<CheckResult> {
    let config_a = ScanConfig {
        master_seed: seed,
        ..ScanConfig::default()
    };
    let config_b = ScanConfig {
        sigma: QuantonOutcome::PortB,
        ..config_a.clone()
    };
    let scan_a = run_scan(&config_a).expect("default scan config is valid");
    let scan_b = run_scan(&config_b).expect("default scan config is valid");

    let mut results = vec![
        ket_normalization(seed),
        eig_reconstruction(seed),
        partial_trace_preserves_trace(seed),
        haar_orthonormality(seed),
        trace_norm_duality_identity(),
        outcome_probability_normalization(),
        detector_mixture_identity(),
        phase_wwd_commutation(),
        double_hadamard_identity(),
        likelihood_ranges(seed),
        basis_completion_invariance(seed),
        englert_optimality_sampling(seed),
        englert_anchor_delta_zero(),
        natural_basis_closed_form(),
        scan_dominance(&scan_a),
        scan_englert_floor(&scan_a),
        scan_duality_violation(&scan_a),
        scan_sigma_symmetry(&scan_a, &scan_b, &config_a),
        optimize_monotone_in_samples(seed),
        csv_round_trip(&scan_a),
    ];
    if let Some(tolerance) = tolerance_override {
        for result in &mut results {
            result.tolerance = tolerance;
        }
    }
    results
}
