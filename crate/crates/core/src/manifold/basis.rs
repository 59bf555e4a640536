use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};

/// An orthonormal basis `X_1..X_n` (`n = N² − 1`) of the traceless Hermitian
/// matrices, with `Tr(X_i X_j) = δ_ij`.
///
/// The elements are the generalized Gell-Mann matrices rescaled to unit
/// Hilbert-Schmidt norm, ordered as: symmetric off-diagonal pairs, antisymmetric
/// off-diagonal pairs, then the diagonal family. For `N = 2` this is
/// `σx/√2, σy/√2, σz/√2`.
#[derive(Clone, Debug)]
pub struct Basis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl Basis {
    pub fn gell_mann(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(dim * dim - 1);
        let pairs: Vec<(usize, usize)> = (0..dim)
            .flat_map(|j| (j + 1..dim).map(move |k| (j, k)))
            .collect();
        for &(j, k) in &pairs {
            let mut m = DMatrix::<C64>::zeros(dim, dim);
            m[(j, k)] = C64::new(r, 0.0);
            m[(k, j)] = C64::new(r, 0.0);
            elements.push(HermitianMatrix::from_hermitian_unchecked(m));
        }
        for &(j, k) in &pairs {
            let mut m = DMatrix::<C64>::zeros(dim, dim);
            m[(j, k)] = C64::new(0.0, -r);
            m[(k, j)] = C64::new(0.0, r);
            elements.push(HermitianMatrix::from_hermitian_unchecked(m));
        }
        for l in 1..dim {
            let c = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = vec![0.0; dim];
            diag[..l].iter_mut().for_each(|d| *d = c);
            diag[l] = -(l as f64) * c;
            elements.push(HermitianMatrix::from_real_diagonal(&diag));
        }
        Ok(Self { dim, elements })
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Manifold dimension `n = N² − 1`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &HermitianMatrix {
        &self.elements[i]
    }

    /// `Σ c_i X_i`.
    pub fn combine(&self, coeffs: &[f64]) -> HermitianMatrix {
        debug_assert_eq!(coeffs.len(), self.len());
        coeffs
            .iter()
            .zip(&self.elements)
            .fold(HermitianMatrix::zeros(self.dim), |acc, (&c, x)| acc.axpy(c, x))
    }

    /// `Tr(X_i h)` for every `i`.
    pub fn project(&self, h: &HermitianMatrix) -> Vec<f64> {
        self.elements.iter().map(|x| x.trace_product(h)).collect()
    }
}
