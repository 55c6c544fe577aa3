//! Minimal complex linear algebra for fixed small dimensions.
//!
//! Everything here is dense and dimension-checked at runtime; the largest
//! space in the simulator is the 6-dimensional quanton-detector product.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Squared-norm tolerance for normalized kets.
pub const KET_NORM_TOL: f64 = 1e-12;
/// Element-wise tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on the Gram matrix of an orthonormal set.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A normalized complex amplitude vector over a finite orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Normalizes `amplitudes` and wraps them in a ket.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Ok(Self::new_with_weight(amplitudes)?.0)
    }

    /// Like [`Ket::new`], but also returns the pre-normalization squared
    /// norm. When the input is the unnormalized branch of a larger state,
    /// that weight is the probability of the branch.
    pub fn new_with_weight(mut amplitudes: Vec<Complex64>) -> Result<(Self, f64)> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension { dim: 0 });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr < 1e-24 {
            return Err(Error::ZeroVector { norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok((Self { amplitudes }, norm_sqr))
    }

    /// Wraps amplitudes that are already normalized (e.g. the output of a
    /// unitary applied to a normalized ket) without renormalizing, so exact
    /// cancellations survive.
    pub(crate) fn from_normalized_unchecked(amplitudes: Vec<Complex64>) -> Self {
        let ket = Self { amplitudes };
        debug_assert!((ket.norm_sqr() - 1.0).abs() < KET_NORM_TOL);
        ket
    }

    /// The `index`-th standard basis vector of a `dim`-dimensional space.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// The rank-1 projector `|k⟩⟨k|`.
    pub fn projector(&self) -> Operator {
        let dim = self.dim();
        let mut op = Operator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                op[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        op
    }
}

/// `⟨a|b⟩`, conjugating the first argument.
pub fn inner(a: &Ket, b: &Ket) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(inner_slices(a.amplitudes(), b.amplitudes()))
}

fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_slice(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// A dense complex matrix acting on a small Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op[(i, i)] = Complex64::ONE;
        }
        op
    }

    /// Builds an operator from row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        Ok(Self { dim, entries })
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut op = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            op[(i, i)] = Complex64::new(v, 0.0);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Maximum element-wise deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                max = max.max(dev);
            }
        }
        max
    }

    fn require_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn mul_vec(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(amplitudes.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self[(i, j)] * amplitudes[j])
                    .sum()
            })
            .collect()
    }

    /// `Re ⟨k|M|k⟩`; real up to rounding when `M` is Hermitian.
    pub fn expectation(&self, ket: &Ket) -> Result<f64> {
        if ket.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: ket.dim(),
                right: self.dim,
            });
        }
        let mk = self.mul_vec(ket.amplitudes());
        Ok(inner_slices(ket.amplitudes(), &mk).re)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let entries = self.entries.iter().map(|z| z * factor).collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// Maximum element-wise modulus of the difference to `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.entries.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// An ordered orthonormal set of detector kets used to read out the WWD.
///
/// The set may be smaller than the full dimension; a complete basis has
/// `len() == dim()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<Ket>,
}

impl MeasurementBasis {
    /// Validates pairwise orthonormality (Gram matrix within
    /// [`ORTHONORMAL_TOL`] of the identity) and wraps the vectors.
    pub fn new(vectors: Vec<Ket>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidDimension { dim: 0 });
        }
        let dim = vectors[0].dim();
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: v.dim(),
                    right: dim,
                });
            }
        }
        if vectors.len() > dim {
            return Err(Error::DimensionMismatch {
                left: vectors.len(),
                right: dim,
            });
        }
        let mut deviation = 0.0f64;
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let g = inner(a, b).expect("dims checked");
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                deviation = deviation.max((g - target).norm());
            }
        }
        if deviation > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { vectors })
    }

    /// Constructor for sets that are orthonormal by construction
    /// (Gram-Schmidt output, eigenvector columns of a unitary accumulator).
    pub(crate) fn from_orthonormal_unchecked(vectors: Vec<Ket>) -> Self {
        Self { vectors }
    }

    /// The standard basis `{|0⟩, |+⟩, |−⟩, ...}` of a `dim`-dimensional
    /// detector space.
    pub fn natural(dim: usize) -> Self {
        Self {
            vectors: (0..dim).map(|i| Ket::basis_state(dim, i)).collect(),
        }
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// Maximum Gram-matrix deviation from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut deviation = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let g = inner(a, b).expect("equal dims");
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                deviation = deviation.max((g - target).norm());
            }
        }
        deviation
    }
}

/// A Hermitian, positive semi-definite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace, and positive semi-definiteness.
    pub fn new(op: Operator) -> Result<Self> {
        op.require_hermitian()?;
        let trace = op.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let (eigenvalues, _) = eig_hermitian(&op)?;
        let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -1e-10 {
            return Err(Error::NotPositiveSemiDefinite { min_eigenvalue });
        }
        Ok(Self { op })
    }

    /// The pure-state density operator `|k⟩⟨k|`.
    pub fn pure(ket: &Ket) -> Self {
        Self {
            op: ket.projector(),
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `⟨k|ρ|k⟩` as a real weight.
    pub fn weight(&self, ket: &Ket) -> Result<f64> {
        self.op.expectation(ket)
    }
}

const JACOBI_MAX_SWEEPS: usize = 48;

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues sorted descending together with the matching
/// orthonormal eigenvectors. Degenerate eigenvalues get an arbitrary but
/// deterministic orthonormal completion of the eigenspace; a zero matrix
/// yields the standard basis.
pub fn eig_hermitian(m: &Operator) -> Result<(Vec<f64>, MeasurementBasis)> {
    m.require_hermitian()?;
    let dim = m.dim();
    let mut a = m.clone();
    let mut v = Operator::identity(dim);

    let scale = a
        .entries
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let off_tol = scale * 1e-15;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= off_tol {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                jacobi_rotate(&mut a, &mut v, p, q, off_tol);
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    let eigenvalues_raw: Vec<f64> = (0..dim).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| {
        eigenvalues_raw[j]
            .partial_cmp(&eigenvalues_raw[i])
            .expect("eigenvalues are finite")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues_raw[i]).collect();
    let vectors: Vec<Ket> = order
        .iter()
        .map(|&col| {
            let amplitudes: Vec<Complex64> = (0..dim).map(|row| v[(row, col)]).collect();
            Ket::new(amplitudes).expect("eigenvector columns are unit vectors")
        })
        .collect();

    Ok((eigenvalues, MeasurementBasis::from_orthonormal_unchecked(vectors)))
}

/// One two-sided rotation zeroing the (p, q) entry of the Hermitian working
/// matrix `a`, accumulated into the eigenvector matrix `v`.
fn jacobi_rotate(a: &mut Operator, v: &mut Operator, p: usize, q: usize, tol: f64) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude <= tol {
        return;
    }
    // Split off the phase so the remaining 2x2 problem is real symmetric.
    let phase = apq / magnitude;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * magnitude);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let dim = a.dim();
    let phase_conj = phase.conj();

    // Column update: A <- A U, V <- V U.
    for i in 0..dim {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = c * aip - s * phase_conj * aiq;
        a[(i, q)] = s * aip + c * phase_conj * aiq;

        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = c * vip - s * phase_conj * viq;
        v[(i, q)] = s * vip + c * phase_conj * viq;
    }
    // Row update: A <- U^H A.
    for j in 0..dim {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = c * apj - s * phase * aqj;
        a[(q, j)] = s * apj + c * phase * aqj;
    }
    // Clamp what the rotation made zero analytically.
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Half the trace norm of a Hermitian operator: `tr|m| / 2`.
pub fn trace_norm_half(m: &Operator) -> Result<f64> {
    let (eigenvalues, _) = eig_hermitian(m)?;
    Ok(0.5 * eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Reduced detector state of a normalized quanton-detector ket.
///
/// The joint amplitude index is quanton-major: `index = 3 q + d` with
/// `q ∈ {a, b} → {0, 1}` and `d ∈ {0, +, −} → {0, 1, 2}`.
pub fn partial_trace_quanton(joint: &Ket) -> Result<DensityOperator> {
    if joint.dim() != 6 {
        return Err(Error::DimensionMismatch {
            left: joint.dim(),
            right: 6,
        });
    }
    let norm_sqr = joint.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let amps = joint.amplitudes();
    let mut op = Operator::zeros(3);
    for d in 0..3 {
        for e in 0..3 {
            op[(d, e)] = (0..2)
                .map(|q| amps[3 * q + d] * amps[3 * q + e].conj())
                .sum();
        }
    }
    DensityOperator::new(op)
}

/// Orthonormalizes `columns` in place by two-pass Gram-Schmidt, then fixes
/// each column's phase so its coefficient along the original column (the
/// diagonal R entry of the implicit QR factorization) is real positive.
///
/// Returns `false` if a column is numerically dependent on its predecessors.
pub(crate) fn orthonormalize_columns(columns: &mut [Vec<Complex64>]) -> bool {
    let n = columns.len();
    for k in 0..n {
        let original = columns[k].clone();
        for _pass in 0..2 {
            for l in 0..k {
                let proj = inner_slices(&columns[l], &columns[k]);
                let (prev, rest) = columns.split_at_mut(k);
                for (x, y) in rest[0].iter_mut().zip(&prev[l]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = norm_slice(&columns[k]);
        if norm < 1e-10 {
            return false;
        }
        for x in &mut columns[k] {
            *x /= norm;
        }
        let r_diag = inner_slices(&columns[k], &original);
        let r_mag = r_diag.norm();
        if r_mag > 0.0 {
            let correction = (r_diag / r_mag).conj();
            for x in &mut columns[k] {
                *x *= correction;
            }
        }
    }
    true
}

/// Samples a complete orthonormal basis distributed with unitary invariance:
/// a matrix of independent standard complex Gaussians is orthonormalized
/// column by column with the QR phase convention fixed by
/// [`orthonormalize_columns`].
pub fn haar_random_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<MeasurementBasis> {
    if dim == 0 {
        return Err(Error::InvalidDimension { dim });
    }
    loop {
        let mut columns: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        if !orthonormalize_columns(&mut columns) {
            // Numerically dependent Ginibre draw; redraw from the same stream.
            continue;
        }
        let vectors = columns
            .into_iter()
            .map(|c| Ket::new(c).expect("orthonormalized column is a unit vector"))
            .collect();
        return Ok(MeasurementBasis::from_orthonormal_unchecked(vectors));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Symmetric conditional detector states for overlap `v` in the natural
    /// basis: chi_a = sqrt(v)|0> + sqrt(1-v)|+>, chi_b = sqrt(v)|0> + sqrt(1-v)|->.
    fn symmetric_chis(v: f64) -> (Ket, Ket) {
        let a = v.sqrt();
        let b = (1.0 - v).sqrt();
        let chi_a = Ket::new(vec![r(a), r(b), r(0.0)]).unwrap();
        let chi_b = Ket::new(vec![r(a), r(0.0), r(b)]).unwrap();
        (chi_a, chi_b)
    }

    /// Independent eigenvalue oracle for 3x3 Hermitian matrices: solve the
    /// characteristic cubic from the matrix invariants with the
    /// trigonometric root formula. Returns roots sorted descending.
    fn char_poly_eigenvalues(m: &Operator) -> [f64; 3] {
        assert_eq!(m.dim(), 3);
        let tr = m.trace().re;
        // Sum of principal 2x2 minors.
        let minor = |i: usize, j: usize| -> f64 {
            (m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)]).re
        };
        let c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
        let det = (m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]))
            .re;
        // lambda^3 - tr lambda^2 + c1 lambda - det = 0; shift to depressed form.
        let p = c1 - tr * tr / 3.0;
        let q = 2.0 * tr.powi(3) / 27.0 - tr * c1 / 3.0 + det;
        let shift = tr / 3.0;
        let mut roots = if p.abs() < 1e-14 {
            let root = (-q).cbrt() + shift;
            [root, root, root]
        } else {
            let m2 = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m2)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            [
                m2 * theta.cos() + shift,
                m2 * (theta - 2.0 * std::f64::consts::PI / 3.0).cos() + shift,
                m2 * (theta - 4.0 * std::f64::consts::PI / 3.0).cos() + shift,
            ]
        };
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots
    }

    #[test]
    fn inner_identity_and_orthogonal() {
        let zero = Ket::basis_state(3, 0);
        let plus = Ket::basis_state(3, 1);
        assert_abs_diff_eq!(inner(&zero, &zero).unwrap().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(inner(&zero, &plus).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_hand_expanded_overlap() {
        // (sqrt(.5)|0> + sqrt(.5)|+>) . (sqrt(.5)|0> + sqrt(.5)|->) = 0.5
        let h = 0.5f64.sqrt();
        let a = Ket::new(vec![r(h), r(h), r(0.0)]).unwrap();
        let b = Ket::new(vec![r(h), r(0.0), r(h)]).unwrap();
        let ip = inner(&a, &b).unwrap();
        assert_abs_diff_eq!(ip.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let a = Ket::basis_state(3, 0);
        let b = Ket::basis_state(2, 0);
        assert!(matches!(
            inner(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ket_constructor_normalizes_and_reports_weight() {
        let (ket, weight) = Ket::new_with_weight(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert_abs_diff_eq!(weight, 25.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ket.norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            Ket::new(vec![Complex64::ZERO; 3]),
            Err(Error::ZeroVector { .. })
        ));
    }

    #[test]
    fn eig_diagonal_matrix() {
        let m = Operator::diagonal(&[1.0, -1.0, 0.0]);
        let (vals, basis) = eig_hermitian(&m).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[2], -1.0, epsilon = 1e-14);
        // Standard basis vectors, matched to the sorted eigenvalues.
        let expected = [0usize, 2, 1];
        for (k, &idx) in expected.iter().enumerate() {
            let overlap = inner(&basis.vectors()[k], &Ket::basis_state(3, idx)).unwrap();
            assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eig_zero_matrix_is_natural_basis() {
        let m = Operator::zeros(3);
        let (vals, basis) = eig_hermitian(&m).unwrap();
        assert_eq!(vals, vec![0.0, 0.0, 0.0]);
        for k in 0..3 {
            let overlap = inner(&basis.vectors()[k], &Ket::basis_state(3, k)).unwrap();
            assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn eig_symmetric_pair_difference_matches_char_poly() {
        // rho = |chi_a><chi_a| - |chi_b><chi_b| for overlap 0.5 has
        // eigenvalues (sqrt(0.75), 0, -sqrt(0.75)).
        let (chi_a, chi_b) = symmetric_chis(0.5);
        let rho = chi_a.projector().sub(&chi_b.projector()).unwrap();
        let (vals, basis) = eig_hermitian(&rho).unwrap();

        let expected = 0.75f64.sqrt();
        assert_abs_diff_eq!(vals[0], expected, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], -expected, epsilon = 1e-12);

        let oracle = char_poly_eigenvalues(&rho);
        for k in 0..3 {
            assert_abs_diff_eq!(vals[k], oracle[k], epsilon = 1e-10);
        }

        // Eigenvector residual: rho v = lambda v.
        for (k, vec) in basis.vectors().iter().enumerate() {
            let mv = rho.mul_vec(vec.amplitudes());
            for (i, amp) in vec.amplitudes().iter().enumerate() {
                assert_abs_diff_eq!((mv[i] - vals[k] * amp).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn eig_complex_offdiagonal() {
        // [[1, i], [-i, 1]] (dim 2) has eigenvalues 2 and 0.
        let m = Operator::from_entries(2, vec![r(1.0), c(0.0, 1.0), c(0.0, -1.0), r(1.0)]).unwrap();
        let (vals, basis) = eig_hermitian(&m).unwrap();
        assert_abs_diff_eq!(vals[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        for (k, vec) in basis.vectors().iter().enumerate() {
            let mv = m.mul_vec(vec.amplitudes());
            for (i, amp) in vec.amplitudes().iter().enumerate() {
                assert_abs_diff_eq!((mv[i] - vals[k] * amp).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = Operator::zeros(3);
        m[(0, 1)] = r(1.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_norm_half_examples() {
        assert_abs_diff_eq!(
            trace_norm_half(&Operator::diagonal(&[1.0, -1.0, 0.0])).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            trace_norm_half(&Operator::diagonal(&[0.5, 0.5, 0.0])).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        let (chi_a, chi_b) = symmetric_chis(0.5);
        let rho = chi_a.projector().sub(&chi_b.projector()).unwrap();
        assert_abs_diff_eq!(trace_norm_half(&rho).unwrap(), 0.75f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        // |psi_a> (x) |0>: amplitudes live at quanton index 0.
        let mut amps = vec![Complex64::ZERO; 6];
        amps[0] = Complex64::ONE;
        let joint = Ket::new(amps).unwrap();
        let rho = partial_trace_quanton(&joint).unwrap();
        let expected = Ket::basis_state(3, 0).projector();
        assert!(rho.operator().max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_correlated_state() {
        // (|psi_a>|0> + |psi_b>|+>)/sqrt(2) -> diag(1/2, 1/2, 0).
        let h = 0.5f64.sqrt();
        let mut amps = vec![Complex64::ZERO; 6];
        amps[0] = r(h); // (q=0, d=0)
        amps[4] = r(h); // (q=1, d=1)
        let joint = Ket::new(amps).unwrap();
        let rho = partial_trace_quanton(&joint).unwrap();
        let expected = Operator::diagonal(&[0.5, 0.5, 0.0]);
        assert!(rho.operator().max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_entangled_pipeline_state() {
        // Hand-expanded final state (|psi_a>(chi_a + chi_b) + |psi_b>(chi_a - chi_b))/2
        // at delta = 0 traces to (|chi_a><chi_a| + |chi_b><chi_b|)/2.
        let (chi_a, chi_b) = symmetric_chis(0.5);
        let mut amps = Vec::with_capacity(6);
        for d in 0..3 {
            amps.push((chi_a.amplitude(d) + chi_b.amplitude(d)) * 0.5);
        }
        for d in 0..3 {
            amps.push((chi_a.amplitude(d) - chi_b.amplitude(d)) * 0.5);
        }
        let joint = Ket::new(amps).unwrap();
        let rho = partial_trace_quanton(&joint).unwrap();
        let expected = chi_a
            .projector()
            .add(&chi_b.projector())
            .unwrap()
            .scaled(0.5);
        assert!(rho.operator().max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_inputs() {
        let joint = Ket::basis_state(4, 0);
        assert!(matches!(
            partial_trace_quanton(&joint),
            Err(Error::DimensionMismatch { .. })
        ));
        // Normalization cannot be bypassed through the public constructors;
        // scale an amplitude directly to probe the tolerance gate.
        let mut bad = Ket::basis_state(6, 0);
        bad.amplitudes[0] = r(1.0 + 1e-6);
        assert!(matches!(
            partial_trace_quanton(&bad),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn haar_dim_one_is_unit_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let basis = haar_random_basis(&mut rng, 1).unwrap();
        assert_eq!(basis.len(), 1);
        assert_abs_diff_eq!(basis.vectors()[0].norm_sqr(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn haar_basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let basis = haar_random_basis(&mut rng, 3).unwrap();
        assert!(basis.orthonormality_deviation() < 1e-10);
    }

    #[test]
    fn haar_mean_overlap_is_inverse_dim() {
        // Unitary invariance: E |<e_1|u>|^2 = 1/dim for any fixed unit u.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let fixed = Ket::new(vec![r(0.6), c(0.0, 0.8), r(0.0)]).unwrap();
        let samples = 10_000;
        let mean: f64 = (0..samples)
            .map(|_| {
                let basis = haar_random_basis(&mut rng, 3).unwrap();
                inner(&basis.vectors()[0], &fixed).unwrap().norm_sqr()
            })
            .sum::<f64>()
            / samples as f64;
        assert!(
            (mean - 1.0 / 3.0).abs() < 0.02,
            "mean overlap {mean} deviates from 1/3"
        );
    }

    #[test]
    fn haar_rejects_zero_dim() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            haar_random_basis(&mut rng, 0),
            Err(Error::InvalidDimension { dim: 0 })
        ));
    }

    #[test]
    fn haar_is_deterministic_for_a_seed() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            haar_random_basis(&mut rng, 3).unwrap()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn measurement_basis_rejects_non_orthonormal() {
        let v = Ket::new(vec![r(1.0), r(0.0), r(0.0)]).unwrap();
        let w = Ket::new(vec![r(0.8), r(0.6), r(0.0)]).unwrap();
        assert!(matches!(
            MeasurementBasis::new(vec![v, w]),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn density_operator_validates() {
        let ok = Operator::diagonal(&[0.5, 0.5, 0.0]);
        assert!(DensityOperator::new(ok).is_ok());

        let bad_trace = Operator::diagonal(&[0.7, 0.5, 0.0]);
        assert!(matches!(
            DensityOperator::new(bad_trace),
            Err(Error::InvalidTrace { .. })
        ));

        let not_psd = Operator::diagonal(&[1.5, -0.5, 0.0]);
        assert!(matches!(
            DensityOperator::new(not_psd),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
    }
}
