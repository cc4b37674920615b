//! Dense complex linear algebra on small square operators.
//!
//! Every operator in the crate (observables, unitaries, density operators)
//! is a [`ComplexMatrix`]. Composite systems use the Kronecker convention
//! `(i ⊗ j) ↦ i·dim(b) + j`: the first factor is the slow index.
//!
//! Hermitian operators are diagonalized into eigenvalue *clusters*: nearly
//! equal eigenvalues are merged and only the cluster projector is exposed, so
//! results never depend on the basis chosen inside a degenerate eigenspace.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, WayError};

pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical thresholds shared by decompositions and boolean verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative gap (times spectral radius) below which eigenvalues merge.
    pub cluster_gap: f64,
    /// Relative magnitude (times spectral radius) treated as a zero eigenvalue.
    pub zero_threshold: f64,
    /// Absolute tolerance for Hermiticity/unitarity checks and verdicts.
    pub validation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster_gap: 1e-8,
            zero_threshold: 1e-10,
            validation: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn with_validation(validation: f64) -> Self {
        Tolerances {
            validation,
            ..Self::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.cluster_gap, self.zero_threshold, self.validation]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
    }
}

/// Square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(WayError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if entries.len() != dim * dim {
            return Err(WayError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(WayError::NonFinite);
        }
        Ok(ComplexMatrix {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &c)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub(crate) fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        ComplexMatrix { inner }
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_row_major(2, &[ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    /// `|v⟩⟨v|`; `v` need not be normalized.
    pub fn outer(v: &CVector) -> Self {
        ComplexMatrix {
            inner: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            inner: &self.inner * c,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn tensor(&self, other: &ComplexMatrix) -> Self {
        tensor(self, other)
    }

    /// `ab − ba`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix {
            inner: &self.inner * &other.inner - &other.inner * &self.inner,
        })
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(WayError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(&self.inner * v)
    }

    /// `⟨v|X|v⟩` for an arbitrary vector `v`.
    pub fn expectation(&self, v: &CVector) -> Result<Complex64> {
        let xv = self.apply(v)?;
        Ok(v.dotc(&xv))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.inner.iter().all(|z| *z == ZERO) {
            return 0.0;
        }
        self.inner.clone().singular_values().max()
    }

    /// Smallest singular value.
    pub fn min_singular_value(&self) -> f64 {
        self.inner.clone().singular_values().min()
    }

    /// `‖X − X†‖`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).spectral_norm()
    }

    /// `‖X†X − I‖`.
    pub fn unitarity_residual(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim())).spectral_norm()
    }

    /// Fails with `NotHermitian` unless `‖X − X†‖ ≤ tol·max(1, ‖X‖)`.
    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual > tol * self.spectral_norm().max(1.0) {
            return Err(WayError::NotHermitian { residual });
        }
        Ok(())
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual > tol {
            return Err(WayError::NotUnitary { residual });
        }
        Ok(())
    }

    pub(crate) fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(WayError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn hermitian_part(&self) -> Self {
        ComplexMatrix {
            inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }
}

impl<'a> std::ops::Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl<'a> std::ops::Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl<'a> std::ops::Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// Unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Accepts amplitudes whose Euclidean norm is 1 within 1e-10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(WayError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(WayError::NonFinite);
        }
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(WayError::NotNormalized { norm });
        }
        Ok(StateVector { amplitudes: v })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(WayError::NotNormalized { norm });
        }
        Ok(StateVector {
            amplitudes: v / Complex64::new(norm, 0.0),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        StateVector { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        StateVector { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &StateVector) -> CVector {
        self.amplitudes.kronecker(&other.amplitudes)
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        StateVector {
            amplitudes: &self.amplitudes * Complex64::from_polar(1.0, phase),
        }
    }
}

/// Hermitian operator resolved into eigenvalue clusters.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Cluster representatives, ascending.
    pub eigenvalues: Vec<f64>,
    /// One orthogonal projector per cluster.
    pub projectors: Vec<ComplexMatrix>,
    bases: Vec<Vec<CVector>>,
    spectral_radius: f64,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// An orthonormal basis of the `k`-th eigenspace.
    pub fn cluster_basis(&self, k: usize) -> &[CVector] {
        &self.bases[k]
    }

    pub fn multiplicity(&self, k: usize) -> usize {
        self.bases[k].len()
    }

    /// `Σ f(λ_k) P_k` with complex-valued `f`.
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let dim = self.projectors[0].dim();
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for (lambda, proj) in self.eigenvalues.iter().zip(&self.projectors) {
            acc += proj.as_nalgebra() * f(*lambda);
        }
        ComplexMatrix::from_nalgebra(acc)
    }

    /// `Σ f(λ_k) P_k`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|x| Complex64::new(f(x), 0.0))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Indices of clusters whose representative is zero relative to the radius.
    pub fn kernel_clusters(&self, tol: &Tolerances) -> Vec<usize> {
        let floor = tol.zero_threshold * self.spectral_radius;
        (0..self.len())
            .filter(|&k| self.eigenvalues[k].abs() <= floor)
            .collect()
    }

    /// Index of the cluster containing `value`, if any lies within `tol`.
    pub fn find_cluster(&self, value: f64, tol: f64) -> Option<usize> {
        self.eigenvalues
            .iter()
            .position(|&lambda| (lambda - value).abs() <= tol)
    }
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        inner: a.inner.kronecker(&b.inner),
    }
}

pub fn spectral_decompose(h: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    h.ensure_hermitian(tol.validation)?;
    let eig = SymmetricEigen::new(h.hermitian_part().inner);
    let n = h.dim();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let spectral_radius = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gap = tol.cluster_gap * spectral_radius;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &idx in &order {
        let lambda = eig.eigenvalues[idx];
        match groups.last_mut() {
            Some(group) if lambda - last <= gap => group.push(idx),
            _ => groups.push(vec![idx]),
        }
        last = lambda;
    }

    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    let mut bases = Vec::with_capacity(groups.len());
    for group in groups {
        let mean = group.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / group.len() as f64;
        let basis: Vec<CVector> = group
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let mut proj = DMatrix::<Complex64>::zeros(n, n);
        for v in &basis {
            proj += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(ComplexMatrix::from_nalgebra(proj));
        bases.push(basis);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        bases,
        spectral_radius,
    })
}

/// `|L| = Σ |λ_k| P_k`.
pub fn operator_modulus(l: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(spectral_decompose(l, tol)?.map(f64::abs))
}

/// `log|L| = Σ log|λ_k| P_k`; fails on a zero eigenvalue.
pub fn operator_log_modulus(l: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let spec = spectral_decompose(l, tol)?;
    if !spec.kernel_clusters(tol).is_empty() {
        return Err(WayError::SingularOperator);
    }
    Ok(spec.map(|x| x.abs().ln()))
}

/// Projector onto the kernel; the zero operator has the identity as kernel.
pub fn kernel_projector(l: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let spec = spectral_decompose(l, tol)?;
    let mut acc = ComplexMatrix::zeros(l.dim());
    for k in spec.kernel_clusters(tol) {
        acc = &acc + &spec.projectors[k];
    }
    Ok(acc)
}

pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(a.commutator(b)?.spectral_norm())
}

/// `⟨i⊗ξ| X |j⊗ξ⟩` as a `dim_h × dim_h` matrix.
pub fn partial_inner(xi: &StateVector, x: &ComplexMatrix, dim_h: usize) -> Result<ComplexMatrix> {
    let dim_k = xi.dim();
    if x.dim() != dim_h * dim_k {
        return Err(WayError::DimensionMismatch {
            expected: dim_h * dim_k,
            found: x.dim(),
        });
    }
    let xi = xi.amplitudes();
    let m = x.as_nalgebra();
    Ok(ComplexMatrix::from_fn(dim_h, |i, j| {
        let mut acc = ZERO;
        for k in 0..dim_k {
            let left = xi[k].conj();
            if left == ZERO {
                continue;
            }
            for l in 0..dim_k {
                acc += left * m[(i * dim_k + k, j * dim_k + l)] * xi[l];
            }
        }
        acc
    }))
}

/// `exp(iH)` through the spectral decomposition.
pub fn exp_i_hermitian(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(spectral_decompose(h, tol)?.map_complex(|x| Complex64::from_polar(1.0, x)))
}

/// `exp(H)` through the spectral decomposition; positive definite.
pub fn exp_hermitian(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(spectral_decompose(h, tol)?.map(f64::exp))
}

/// Embeds `A` on the first factor: `A ⊗ I_k`.
pub fn on_first(a: &ComplexMatrix, dim_k: usize) -> ComplexMatrix {
    tensor(a, &ComplexMatrix::identity(dim_k))
}

/// Embeds `B` on the second factor: `I_h ⊗ B`.
pub fn on_second(dim_h: usize, b: &ComplexMatrix) -> ComplexMatrix {
    tensor(&ComplexMatrix::identity(dim_h), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).spectral_norm()
    }

    #[test]
    fn tensor_conventions() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(
            tensor(&ComplexMatrix::pauli_z(), &i2),
            ComplexMatrix::diag(&[1.0, 1.0, -1.0, -1.0])
        );
        let xz = tensor(&ComplexMatrix::pauli_x(), &ComplexMatrix::pauli_z());
        assert_eq!(xz.get(0, 2), ONE);
        assert_eq!(xz.get(1, 3), c(-1.0, 0.0));
        assert_eq!(xz.get(0, 0), ZERO);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::from_real(2, &[1.0, 2.0, 3.0]),
            Err(WayError::DimensionMismatch { .. })
        ));
        assert_eq!(
            ComplexMatrix::from_real(1, &[f64::NAN]),
            Err(WayError::NonFinite)
        );
        assert!(matches!(
            StateVector::new(vec![ONE, ONE]),
            Err(WayError::NotNormalized { .. })
        ));
    }

    #[test]
    fn pauli_x_spectrum() {
        let spec = spectral_decompose(&ComplexMatrix::pauli_x(), &Tolerances::default()).unwrap();
        assert_eq!(spec.len(), 2);
        assert_abs_diff_eq!(spec.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-12);
        let i2 = ComplexMatrix::identity(2);
        let x = ComplexMatrix::pauli_x();
        let minus = (&i2 - &x).scale_real(0.5);
        let plus = (&i2 + &x).scale_real(0.5);
        assert!(max_diff(&spec.projectors[0], &minus) < 1e-12);
        assert!(max_diff(&spec.projectors[1], &plus) < 1e-12);
    }

    #[test]
    fn identity_is_single_cluster() {
        let spec = spectral_decompose(&ComplexMatrix::identity(3), &Tolerances::default()).unwrap();
        assert_eq!(spec.len(), 1);
        assert_abs_diff_eq!(spec.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert!(max_diff(&spec.projectors[0], &ComplexMatrix::identity(3)) < 1e-12);
        assert_eq!(spec.multiplicity(0), 3);
    }

    #[test]
    fn near_degenerate_eigenvalues_merge() {
        let h = ComplexMatrix::diag(&[0.0, 1e-12, 1.0]);
        let spec = spectral_decompose(&h, &Tolerances::default()).unwrap();
        assert_eq!(spec.len(), 2);
        assert_abs_diff_eq!(spec.eigenvalues[0], 0.5e-12, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.projectors[0].trace().re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            spectral_decompose(&m, &Tolerances::default()),
            Err(WayError::NotHermitian { .. })
        ));
        assert!(matches!(
            operator_modulus(&m, &Tolerances::default()),
            Err(WayError::NotHermitian { .. })
        ));
    }

    #[test]
    fn modulus_examples() {
        let tol = Tolerances::default();
        let abs_x = operator_modulus(&ComplexMatrix::pauli_x(), &tol).unwrap();
        assert!(max_diff(&abs_x, &ComplexMatrix::identity(2)) < 1e-12);
        let abs_d = operator_modulus(&ComplexMatrix::diag(&[-2.0, 3.0]), &tol).unwrap();
        assert!(max_diff(&abs_d, &ComplexMatrix::diag(&[2.0, 3.0])) < 1e-12);
        let abs_0 = operator_modulus(&ComplexMatrix::zeros(2), &tol).unwrap();
        assert_eq!(abs_0.spectral_norm(), 0.0);
    }

    #[test]
    fn log_modulus_examples() {
        let tol = Tolerances::default();
        let e = std::f64::consts::E;
        assert!(
            operator_log_modulus(&ComplexMatrix::identity(2), &tol)
                .unwrap()
                .spectral_norm()
                < 1e-12
        );
        let log = operator_log_modulus(&ComplexMatrix::diag(&[e, e * e]), &tol).unwrap();
        assert!(max_diff(&log, &ComplexMatrix::diag(&[1.0, 2.0])) < 1e-12);
        let log_x = operator_log_modulus(&ComplexMatrix::pauli_x(), &tol).unwrap();
        assert!(log_x.spectral_norm() < 1e-12);
        assert_eq!(
            operator_log_modulus(&ComplexMatrix::diag(&[0.0, 1.0]), &tol),
            Err(WayError::SingularOperator)
        );
    }

    #[test]
    fn kernel_projector_examples() {
        let tol = Tolerances::default();
        let k = kernel_projector(&ComplexMatrix::diag(&[0.0, 5.0]), &tol).unwrap();
        assert!(max_diff(&k, &ComplexMatrix::diag(&[1.0, 0.0])) < 1e-12);
        let k = kernel_projector(&ComplexMatrix::pauli_x(), &tol).unwrap();
        assert!(k.spectral_norm() < 1e-12);
        let i2 = ComplexMatrix::identity(2);
        let x = ComplexMatrix::pauli_x();
        let plus = (&i2 + &x).scale_real(0.5);
        let minus = (&i2 - &x).scale_real(0.5);
        let k = kernel_projector(&plus, &tol).unwrap();
        assert!(max_diff(&k, &minus) < 1e-12);
        let k = kernel_projector(&ComplexMatrix::zeros(3), &tol).unwrap();
        assert!(max_diff(&k, &ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn commutator_norm_examples() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        assert_eq!(commutator_norm(&z, &z).unwrap(), 0.0);
        assert_abs_diff_eq!(commutator_norm(&z, &x).unwrap(), 2.0, epsilon = 1e-12);
        let plus = (&ComplexMatrix::identity(2) + &x).scale_real(0.5);
        assert_abs_diff_eq!(commutator_norm(&z, &plus).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            commutator_norm(&z, &ComplexMatrix::identity(3)),
            Err(WayError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_inner_examples() {
        let a = ComplexMatrix::from_real(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = ComplexMatrix::from_row_major(
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-1.0, 0.0)],
        )
        .unwrap();
        let xi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let expect = b.expectation(xi.amplitudes()).unwrap();
        let got = partial_inner(&xi, &tensor(&a, &b), 2).unwrap();
        assert!(max_diff(&got, &a.scale(expect)) < 1e-12);

        let e0 = StateVector::basis(2, 0);
        let got = partial_inner(&e0, &tensor(&a, &b), 2).unwrap();
        assert!(max_diff(&got, &a.scale(b.get(0, 0))) < 1e-12);

        let got = partial_inner(&xi, &ComplexMatrix::identity(6), 4);
        assert!(got.is_err());
        let xi3 = StateVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let got = partial_inner(&xi3, &ComplexMatrix::identity(6), 2).unwrap();
        assert!(max_diff(&got, &ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn exp_i_examples() {
        let tol = Tolerances::default();
        let u = exp_i_hermitian(&ComplexMatrix::zeros(2), &tol).unwrap();
        assert!(max_diff(&u, &ComplexMatrix::identity(2)) < 1e-12);
        let h = ComplexMatrix::pauli_z().scale_real(std::f64::consts::FRAC_PI_2);
        let u = exp_i_hermitian(&h, &tol).unwrap();
        let expected = ComplexMatrix::from_row_major(2, &[I, ZERO, ZERO, -I]).unwrap();
        assert!(max_diff(&u, &expected) < 1e-12);
        let u = exp_i_hermitian(
            &ComplexMatrix::identity(2).scale_real(std::f64::consts::PI),
            &tol,
        )
        .unwrap();
        assert!(max_diff(&u, &ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-12);
    }
}
