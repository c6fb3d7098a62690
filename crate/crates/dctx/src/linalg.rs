//! Dense complex linear algebra for Hilbert spaces of dimension 2..16.
//!
//! Everything is stored row-major in flat `Vec<Complex64>` buffers; the
//! dimensions in this crate are tiny (at most 16 for criterion evaluation, 64
//! for the extended Lindblad oracle space), so no sparse structures are used.
//! All values are immutable after construction and all operations are pure.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Default tolerance for Hermiticity / positivity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A dense complex square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// A dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major entry buffer; `entries.len()` must be `dim^2`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must equal dim^2");
        Self { dim, entries }
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            entries: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Diagonal matrix from the given complex diagonal.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim, v.dim(), "matrix-vector dimension mismatch");
        let n = self.dim;
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.entries[i * n + j] * v.get(j))
                    .sum::<Complex64>()
            })
            .collect();
        ComplexVector::from_entries(entries)
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self * rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &ComplexMatrix) -> Complex64 {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.entries[i * n + k] * rhs.entries[k * n + i];
            }
        }
        acc
    }

    /// Expectation value `tr(self * rho)`, returned as a real number.
    ///
    /// The imaginary part is discarded; it vanishes for Hermitian `self` and
    /// Hermitian `rho`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        self.trace_product(rho).re
    }

    /// Largest entrywise absolute deviation from `rhs`.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Max |A - A^dag| residual.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// True when `max |A - A^dag| <= tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Kronecker product; `out[(i*b.dim+k),(j*b.dim+l)] = a[i,j] * b[k,l]`.
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let a = self.entries[i * na + j];
                for k in 0..nb {
                    for l in 0..nb {
                        out.entries[(i * nb + k) * n + (j * nb + l)] =
                            a * other.entries[k * nb + l];
                    }
                }
            }
        }
        out
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Checks Hermiticity to 1e-10 first. Internally the complex problem is
    /// embedded as the real symmetric matrix `[[X, -Y], [Y, X]]` (with
    /// `A = X + iY`), whose spectrum is that of `A` with every eigenvalue
    /// doubled.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let residual = self.hermiticity_residual();
        if residual > DEFAULT_TOL {
            return Err(Error::NotHermitian {
                residual,
                tol: DEFAULT_TOL,
            });
        }
        Ok(self.hermitian_eigenvalues_unchecked())
    }

    fn hermitian_eigenvalues_unchecked(&self) -> Vec<f64> {
        let n = self.dim;
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.get(i, j);
                m[(i, j)] = z.re;
                m[(n + i, n + j)] = z.re;
                m[(i, n + j)] = -z.im;
                m[(n + i, j)] = z.im;
            }
        }
        let mut eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs.into_iter().step_by(2).collect()
    }

    /// Operator (spectral) norm of a Hermitian matrix.
    pub fn hermitian_norm(&self) -> Result<f64> {
        let eigs = self.hermitian_eigenvalues()?;
        Ok(eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs())))
    }

    /// Validate a (possibly subnormalized) density block and return its trace.
    ///
    /// Confirms Hermiticity, eigenvalues `>= -tol` and `-tol <= trace <=
    /// 1 + tol`. The error names the violated property.
    pub fn validate_density_block(&self, tol: f64) -> Result<f64> {
        let residual = self.hermiticity_residual();
        if residual > tol {
            return Err(Error::InvalidState(format!(
                "block not Hermitian (residual {residual:.3e} > {tol:.3e})"
            )));
        }
        let eigs = self.hermitian_eigenvalues_unchecked();
        if let Some(&min) = eigs.first() {
            if min < -tol {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:.3e} < -{tol:.3e}"
                )));
            }
        }
        let trace = self.trace().re;
        if trace < -tol {
            return Err(Error::InvalidState(format!("trace {trace:.3e} < 0")));
        }
        if trace > 1.0 + tol {
            return Err(Error::InvalidState(format!("trace {trace:.3e} > 1")));
        }
        Ok(trace)
    }
}

impl ComplexVector {
    pub fn from_entries(entries: Vec<Complex64>) -> Self {
        assert!(!entries.is_empty(), "vector dimension must be positive");
        Self { entries }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::from_entries(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Basis vector `e_index` in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut entries = vec![Complex64::new(0.0, 0.0); dim];
        entries[index] = Complex64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i]
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn dot(&self, other: &ComplexVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// True when `| ||v|| - 1 | <= tol`.
    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Returns the normalized vector, or `None` when the norm is below `eps`.
    pub fn normalized(&self, eps: f64) -> Option<ComplexVector> {
        let n = self.norm();
        if n < eps {
            return None;
        }
        Some(ComplexVector {
            entries: self
                .entries
                .iter()
                .map(|a| a / Complex64::new(n, 0.0))
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), other.dim());
        ComplexVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector {
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Outer product `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.entries[i] * self.entries[j].conj());
            }
        }
        out
    }

    /// Kronecker product of two vectors.
    pub fn tensor(&self, other: &ComplexVector) -> ComplexVector {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        ComplexVector { entries }
    }
}

/// Free-function form of the Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    assert!(!factors.is_empty());
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.tensor(f);
    }
    out
}

/// Pauli sigma_x.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

/// Pauli sigma_y.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_entries(
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// Pauli sigma_z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// `n . sigma` for a real 3-vector `n`.
pub fn bloch_operator(n: [f64; 3]) -> ComplexMatrix {
    let x = pauli_x().scale(Complex64::new(n[0], 0.0));
    let y = pauli_y().scale(Complex64::new(n[1], 0.0));
    let z = pauli_z().scale(Complex64::new(n[2], 0.0));
    x.add(&y).add(&z)
}

/// Projector `(1 + n . sigma) / 2` onto the Bloch direction `n` (unit).
pub fn bloch_projector(n: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::identity(2)
        .add(&bloch_operator(n))
        .scale(Complex64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id2 = ComplexMatrix::identity(2);
        assert_eq!(id2.tensor(&id2), ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_block_structure() {
        // sigma_x (x) 1 = [[0, 1], [1, 0]] in 2x2 blocks
        let t = pauli_x().tensor(&ComplexMatrix::identity(2));
        let expected = ComplexMatrix::from_real(
            4,
            &[
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0,
            ],
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn tensor_dimension_arithmetic() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert_eq!(a.tensor(&b).dim(), 6);
    }

    #[test]
    fn tensor_associative_on_exact_inputs() {
        // Pauli entries are 0, +-1, +-i, whose products are exact in floating
        // point, so associativity holds entry for entry.
        let (a, b, cm) = (pauli_x(), pauli_y(), pauli_z());
        assert_eq!(a.tensor(&b).tensor(&cm), a.tensor(&b.tensor(&cm)));
    }

    #[test]
    fn eigenvalues_of_sigma_z() {
        let eigs = pauli_z().hermitian_eigenvalues().unwrap();
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_identity() {
        let eigs = ComplexMatrix::identity(2).hermitian_eigenvalues().unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_sorted_ascending() {
        let m = ComplexMatrix::from_diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let eigs = m.hermitian_eigenvalues().unwrap();
        let expected = [1.0, 2.0, 3.0];
        for (e, x) in eigs.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_complex_hermitian() {
        // [[1, i], [-i, 1]] has spectrum {0, 2}
        let m = ComplexMatrix::from_entries(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let eigs = m.hermitian_eigenvalues().unwrap();
        assert!(eigs[0].abs() < 1e-12);
        assert!((eigs[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, c(1.0, 0.0));
        assert!(matches!(
            m.hermitian_eigenvalues(),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn validate_pure_state_block() {
        let p = ComplexVector::basis(2, 0).projector();
        assert!((p.validate_density_block(DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_subnormalized_block() {
        let p = ComplexVector::basis(2, 0).projector().scale(c(0.5, 0.0));
        assert!((p.validate_density_block(DEFAULT_TOL).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_negative_eigenvalue() {
        let err = pauli_x().validate_density_block(DEFAULT_TOL).unwrap_err();
        match err {
            Error::InvalidState(msg) => assert!(msg.contains("negative eigenvalue")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn projector_of_unit_vector_has_unit_trace() {
        let v = ComplexVector::from_entries(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert!(v.is_unit(1e-12));
        let p = v.projector();
        assert!((p.trace().re - 1.0).abs() < 1e-12);
        assert!(p.is_hermitian(1e-12));
    }
}
