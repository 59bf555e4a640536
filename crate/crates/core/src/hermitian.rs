//! Hermitian matrices and their eigendecompositions.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// A complex Hermitian `N x N` matrix.
///
/// Construction symmetrizes the input as `(M + M†)/2`, so the stored entries are
/// Hermitian to rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Symmetrizes `m`. Fails only on a non-square input.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        Ok(Self::symmetrized(m))
    }

    /// Like [`HermitianMatrix::new`] but rejects inputs whose anti-Hermitian part
    /// exceeds `tol` entrywise.
    pub fn new_checked(m: DMatrix<C64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        let dev = (&m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: DMatrix<C64>) -> Self {
        let adj = m.adjoint();
        Self {
            m: (m + adj) * C64::new(0.5, 0.0),
        }
    }

    pub(crate) fn from_hermitian_unchecked(m: DMatrix<C64>) -> Self {
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self {
            m: DMatrix::from_diagonal(&v),
        }
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        if im.len() != n || re.iter().chain(im).any(|row| row.len() != n) {
            return Err(Error::Format("re/im must both be N rows of N entries".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| C64::new(re[i][j], im[i][j])))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    /// Real part of the trace; the imaginary part vanishes for Hermitian input.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `Re Tr(self * other)`, which is real for two Hermitian matrices.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.m[(i, j)] * other.m[(j, i)]).re;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            m: &self.m * C64::new(c, 0.0),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &HermitianMatrix) -> Self {
        Self {
            m: &self.m + &other.m * C64::new(c, 0.0),
        }
    }

    /// `self + c * 1`.
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..self.dim() {
            m[(i, i)] += C64::new(c, 0.0);
        }
        Self { m }
    }

    /// Eigendecomposition `U diag(λ) U†`.
    pub fn eigh(&self) -> Spectrum {
        let eig = self.m.clone().symmetric_eigen();
        Spectrum {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    /// Conjugation `V X V†`, Hermitian for Hermitian `X`.
    pub fn conjugate_by(&self, v: &DMatrix<C64>) -> HermitianMatrix {
        HermitianMatrix::symmetrized(v * &self.m * v.adjoint())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: &self.m - &rhs.m }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// Eigenvalues and (column) eigenvectors of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Same eigenvectors, eigenvalues mapped through `f`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Spectrum {
        Spectrum {
            values: self.values.map(f),
            vectors: self.vectors.clone(),
        }
    }

    /// `U f(Λ) U†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = C64::new(f(self.values[j]), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        HermitianMatrix::symmetrized(scaled * self.vectors.adjoint())
    }

    /// Components `U† X U` of `x` in the eigenbasis.
    pub fn to_eigenbasis(&self, x: &HermitianMatrix) -> DMatrix<C64> {
        self.vectors.adjoint() * x.as_matrix() * &self.vectors
    }

    /// Inverse of [`Spectrum::to_eigenbasis`].
    pub fn from_eigenbasis(&self, y: &DMatrix<C64>) -> HermitianMatrix {
        HermitianMatrix::symmetrized(&self.vectors * y * self.vectors.adjoint())
    }

    /// Schur (entrywise) action of a real multiplier table `w(a, b)` in the eigenbasis.
    pub fn schur_apply(&self, x: &HermitianMatrix, w: impl Fn(usize, usize) -> f64) -> HermitianMatrix {
        let mut y = self.to_eigenbasis(x);
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                y[(a, b)] *= C64::new(w(a, b), 0.0);
            }
        }
        self.from_eigenbasis(&y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.3),
                C64::new(2.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(3.0, 0.0),
            ],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(h.get(0, 1), C64::new(1.0, 0.5));
        assert_eq!(h.get(1, 0), C64::new(1.0, -0.5));
    }

    #[test]
    fn checked_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        );
        assert!(matches!(
            HermitianMatrix::new_checked(m, 1e-9),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            HermitianMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        ));
    }

    #[test]
    fn spectrum_reconstructs() {
        let h = HermitianMatrix::from_parts(
            &[vec![2.0, 0.5, 0.1], vec![0.5, 1.0, -0.2], vec![0.1, -0.2, 0.5]],
            &[vec![0.0, 0.3, -0.4], vec![-0.3, 0.0, 0.2], vec![0.4, -0.2, 0.0]],
        )
        .unwrap();
        let back = h.eigh().apply(|x| x);
        assert!((&back - &h).max_abs() < 1e-13);
        let sq = h.eigh().apply(|x| x * x);
        let direct = HermitianMatrix::new(h.as_matrix() * h.as_matrix()).unwrap();
        assert!((&sq - &direct).max_abs() < 1e-12);
    }
}
