//! Monte Carlo maximization of the readout likelihood over random
//! orthonormal bases for the quanton-first order, plus the reproducible
//! (visibility, phase) scan driver.
//!
//! Reproducibility contract: every grid cell derives its own random
//! substream from the master seed and the cell's grid indices, so scan
//! output is bit-identical for a given configuration regardless of worker
//! count or evaluation order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{
    haar_random_basis, orthonormalize_columns, DensityOperator, Ket, MeasurementBasis,
};
use crate::interferometer::{
    detector_state_quanton_first, quanton_probability, PhaseShift, QuantonOutcome, WwdPair,
};
use crate::whichway::{englert_basis, likelihood};

/// Parameters of a distinguishability scan over the (visibility, δ) grid.
///
/// The δ grid is uniform over `[0, 2π)` with step `k` at `2πk / delta_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub visibilities: Vec<f64>,
    pub delta_steps: usize,
    pub samples: usize,
    pub sigma: QuantonOutcome,
    pub master_seed: u64,
}

impl Default for ScanConfig {
    /// The reference scan: visibilities 50%, 90%, 97%; fifty phase steps;
    /// 10,000 random bases per cell; quanton found in port a; seed 42.
    fn default() -> Self {
        Self {
            visibilities: vec![0.5, 0.9, 0.97],
            delta_steps: 50,
            samples: 10_000,
            sigma: QuantonOutcome::PortA,
            master_seed: 42,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        for &v in &self.visibilities {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::OutOfRange {
                    name: "visibility",
                    value: v,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        if self.delta_steps == 0 {
            return Err(Error::OutOfRange {
                name: "delta_steps",
                value: 0.0,
                min: 1.0,
                max: f64::MAX,
            });
        }
        if self.samples == 0 {
            return Err(Error::OutOfRange {
                name: "samples",
                value: 0.0,
                min: 1.0,
                max: f64::MAX,
            });
        }
        Ok(())
    }
}

/// One evaluated (visibility, δ) cell.
///
/// `d_opt` is the Monte Carlo optimum over random bases plus the two
/// deterministic candidates; `d_englert_line` / `d_natural_line` are the
/// reference curves for those candidates alone; `d_englert_bound` is
/// `√(1 − V²)`, the distinguishability available when the detector is read
/// out first. The three optional fields are absent exactly when the outcome
/// probability vanishes and the projected detector state is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub delta: f64,
    pub visibility: f64,
    pub sigma: i32,
    pub outcome_probability: f64,
    pub d_opt: Option<f64>,
    pub d_englert_line: Option<f64>,
    pub d_natural_line: Option<f64>,
    pub d_englert_bound: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random substream for one grid cell: a splitmix64 mix of the
/// master seed with the cell's (visibility index, δ index) pair.
pub fn substream_seed(master_seed: u64, v_index: usize, delta_index: usize) -> u64 {
    let cell = ((v_index as u64) << 32) ^ (delta_index as u64 & 0xFFFF_FFFF);
    splitmix64(master_seed ^ splitmix64(cell))
}

/// Maximizes the rescaled likelihood `2L − 1` over `samples` Haar-random
/// readout bases plus the two deterministic candidates (natural basis and
/// the eigenbasis readout), for the detector state projected by the quanton
/// outcome. Returns the best value and the basis achieving it.
///
/// Candidate inclusion makes `d_opt ≥ max(d_natural, d_englert)` exact, and
/// drawing the samples sequentially from `rng` makes the result
/// non-decreasing in `samples` for a fixed starting stream.
pub fn optimize_distinguishability<R: Rng + ?Sized>(
    wwd: &WwdPair,
    ps: PhaseShift,
    out: QuantonOutcome,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, MeasurementBasis)> {
    let (state, _) = detector_state_quanton_first(wwd, ps, out)?;
    let detector = DensityOperator::pure(&state);

    let mut best_d = f64::NEG_INFINITY;
    let mut best_basis = None;
    for candidate in [MeasurementBasis::natural(3), englert_basis(wwd)] {
        let report = likelihood(wwd, &candidate, &detector)?;
        if report.d_value > best_d {
            best_d = report.d_value;
            best_basis = Some(candidate);
        }
    }
    for _ in 0..samples {
        let basis = haar_random_basis(rng, 3)?;
        let report = likelihood(wwd, &basis, &detector)?;
        if report.d_value > best_d {
            best_d = report.d_value;
            best_basis = Some(basis);
        }
    }
    Ok((best_d, best_basis.expect("deterministic candidates were evaluated")))
}

/// Evaluates one (visibility, δ) cell: the optimized distinguishability,
/// both reference lines, and the outcome probability. Cells with vanishing
/// outcome probability are flagged with absent optional fields rather than
/// failing.
pub fn scan_cell(
    visibility: f64,
    ps: PhaseShift,
    sigma: QuantonOutcome,
    samples: usize,
    stream_seed: u64,
) -> Result<ScanRecord> {
    let wwd = WwdPair::symmetric(visibility)?;
    let outcome_probability = quanton_probability(&wwd, ps, sigma);
    let d_englert_bound = (1.0 - visibility * visibility).max(0.0).sqrt();

    let (d_opt, d_englert_line, d_natural_line) =
        match detector_state_quanton_first(&wwd, ps, sigma) {
            Err(Error::ZeroProbabilityOutcome { .. }) => (None, None, None),
            Err(other) => return Err(other),
            Ok((state, _)) => {
                let detector = DensityOperator::pure(&state);
                let natural =
                    likelihood(&wwd, &MeasurementBasis::natural(3), &detector)?.d_value;
                let englert = likelihood(&wwd, &englert_basis(&wwd), &detector)?.d_value;
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
                let (d_opt, _) = optimize_distinguishability(&wwd, ps, sigma, samples, &mut rng)?;
                (Some(d_opt), Some(englert), Some(natural))
            }
        };

    Ok(ScanRecord {
        delta: ps.radians(),
        visibility,
        sigma: sigma.sigma(),
        outcome_probability,
        d_opt,
        d_englert_line,
        d_natural_line,
        d_englert_bound,
    })
}

/// The substream index of a cell. The projected detector state for
/// `σ = −1` at phase δ is identical to the one for `σ = +1` at δ + π, so on
/// an even grid those two cells draw the same substream: the two σ scans
/// then sample the same bases on the same states and are point-for-point
/// comparable instead of differing by independent Monte Carlo noise.
fn stream_delta_index(sigma: QuantonOutcome, delta_index: usize, delta_steps: usize) -> usize {
    match sigma {
        QuantonOutcome::PortA => delta_index,
        QuantonOutcome::PortB if delta_steps.is_multiple_of(2) => {
            (delta_index + delta_steps / 2) % delta_steps
        }
        QuantonOutcome::PortB => delta_index,
    }
}

/// Runs the full scan, one record per (visibility, δ) cell, parallelized
/// over cells. Output order is (visibility index, δ index), independent of
/// the worker count.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = (0..config.visibilities.len())
        .flat_map(|vi| (0..config.delta_steps).map(move |di| (vi, di)))
        .collect();
    cells
        .into_par_iter()
        .map(|(vi, di)| {
            let stream_di = stream_delta_index(config.sigma, di, config.delta_steps);
            scan_cell(
                config.visibilities[vi],
                PhaseShift::grid_point(di, config.delta_steps),
                config.sigma,
                config.samples,
                substream_seed(config.master_seed, vi, stream_di),
            )
        })
        .collect()
}

const BRUTE_FORCE_SAMPLES: usize = 1_000_000;
const BRUTE_FORCE_CHUNKS: usize = 200;
const REFINEMENT_TRIALS_PER_STEP: usize = 300;
// First 64 bits of the hexadecimal expansion of pi.
const BRUTE_FORCE_SEED: u64 = 0x243F_6A88_85A3_08D3;

/// Draws a nearby basis: adds `step`-scaled complex Gaussian noise to every
/// amplitude and re-orthonormalizes. `None` when the perturbed columns are
/// numerically dependent.
fn perturb_basis<R: Rng + ?Sized>(
    basis: &MeasurementBasis,
    step: f64,
    rng: &mut R,
) -> Option<MeasurementBasis> {
    let mut columns: Vec<Vec<Complex64>> = basis
        .vectors()
        .iter()
        .map(|v| v.amplitudes().to_vec())
        .collect();
    for column in &mut columns {
        for amplitude in column.iter_mut() {
            *amplitude += step
                * Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    if !orthonormalize_columns(&mut columns) {
        return None;
    }
    let vectors = columns
        .into_iter()
        .map(|c| Ket::new(c).expect("orthonormalized column is a unit vector"))
        .collect();
    Some(MeasurementBasis::from_orthonormal_unchecked(vectors))
}

/// A second, independent estimate of the optimal distinguishability for one
/// cell: a dense random search (10⁶ samples in deterministic parallel
/// chunks) followed by iterative local perturbation with shrinking step
/// size. Intended as a test oracle for [`optimize_distinguishability`], not
/// for scanning.
pub fn brute_force_reference(
    wwd: &WwdPair,
    ps: PhaseShift,
    out: QuantonOutcome,
) -> Result<f64> {
    let (state, _) = detector_state_quanton_first(wwd, ps, out)?;
    let detector = DensityOperator::pure(&state);

    let mut best_d = f64::NEG_INFINITY;
    let mut best_basis = None;
    for candidate in [MeasurementBasis::natural(3), englert_basis(wwd)] {
        let report = likelihood(wwd, &candidate, &detector)?;
        if report.d_value > best_d {
            best_d = report.d_value;
            best_basis = Some(candidate);
        }
    }

    let chunk_size = BRUTE_FORCE_SAMPLES / BRUTE_FORCE_CHUNKS;
    let chunk_results: Vec<Result<(f64, MeasurementBasis)>> = (0..BRUTE_FORCE_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(splitmix64(BRUTE_FORCE_SEED ^ chunk as u64));
            let mut local_best = f64::NEG_INFINITY;
            let mut local_basis = None;
            for _ in 0..chunk_size {
                let basis = haar_random_basis(&mut rng, 3)?;
                let report = likelihood(wwd, &basis, &detector)?;
                if report.d_value > local_best {
                    local_best = report.d_value;
                    local_basis = Some(basis);
                }
            }
            Ok((local_best, local_basis.expect("chunk is non-empty")))
        })
        .collect();
    for result in chunk_results {
        let (d, basis) = result?;
        if d > best_d {
            best_d = d;
            best_basis = Some(basis);
        }
    }

    let mut best_basis = best_basis.expect("deterministic candidates were evaluated");
    let mut rng =
        ChaCha8Rng::seed_from_u64(splitmix64(BRUTE_FORCE_SEED ^ 0xFFFF_0000_0000_0001));
    let mut step = 0.5;
    while step > 1e-7 {
        for _ in 0..REFINEMENT_TRIALS_PER_STEP {
            let Some(candidate) = perturb_basis(&best_basis, step, &mut rng) else {
                continue;
            };
            let report = likelihood(wwd, &candidate, &detector)?;
            if report.d_value > best_d {
                best_d = report.d_value;
                best_basis = candidate;
            }
        }
        step *= 0.5;
    }

    Ok(best_d)
}
