use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, Spectrum};

/// Smallest eigenvalue admitted for a point of the manifold.
pub const EIGENVALUE_FLOOR: f64 = 1e-8;

/// Tolerance on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-12;

/// A strictly positive, unit-trace Hermitian matrix. The eigendecomposition is
/// computed once at construction and cached.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    /// Validates trace and eigenvalue floor.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let spectrum = matrix.eigh();
        let min = spectrum.min();
        if min < EIGENVALUE_FLOOR {
            return Err(Error::OutOfManifold {
                eigenvalue: min,
                floor: EIGENVALUE_FLOOR,
            });
        }
        Ok(Self { matrix, spectrum })
    }

    /// Divides by the trace first; useful for sampled or exponentiated matrices.
    pub fn normalized(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(matrix.scale(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Self::new(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(p))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.values.as_slice()
    }

    pub fn log(&self) -> HermitianMatrix {
        self.spectrum.apply(f64::ln)
    }

    pub fn power(&self, s: f64) -> HermitianMatrix {
        self.spectrum.apply(|p| p.powf(s))
    }

    /// Von Neumann entropy `−Tr ρ log ρ`.
    pub fn entropy(&self) -> f64 {
        -self.eigenvalues().iter().map(|&p| p * p.ln()).sum::<f64>()
    }

    /// Entrywise closeness of the underlying matrices.
    pub fn same_point(&self, other: &DensityMatrix) -> bool {
        self.dim() == other.dim() && (&self.matrix - &other.matrix).max_abs() <= 1e-12
    }

    pub fn to_file_format(&self) -> DensityFile {
        DensityFile::from_matrix(&self.matrix)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.into_density()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file_format()).expect("plain numeric struct serializes")
    }
}

/// On-disk form `{"dim": N, "re": [[..]], "im": [[..]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Anti-Hermitian tolerance applied by the file reader before symmetrizing.
const FILE_HERMITIAN_TOL: f64 = 1e-9;

impl DensityFile {
    pub fn from_matrix(m: &HermitianMatrix) -> Self {
        let n = m.dim();
        Self {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m.get(i, j).re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m.get(i, j).im).collect()).collect(),
        }
    }

    pub fn into_density(self) -> Result<DensityMatrix> {
        if self.re.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.re.len(),
            });
        }
        let probe = HermitianMatrix::from_parts(&self.re, &self.im)?;
        // from_parts symmetrizes; re-check the raw entries against the tolerance
        let n = self.dim;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                dev = dev
                    .max((self.re[i][j] - self.re[j][i]).abs())
                    .max((self.im[i][j] + self.im[j][i]).abs());
            }
        }
        if dev > FILE_HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        DensityMatrix::new(probe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DensityMatrix::from_diagonal(&[0.75, 0.25]).is_ok());
        assert!(matches!(
            DensityMatrix::from_diagonal(&[0.7, 0.25]),
            Err(Error::InvalidTrace(_))
        ));
        match DensityMatrix::from_diagonal(&[1.0 - 1e-9, 1e-9]) {
            Err(Error::OutOfManifold { eigenvalue, .. }) => assert!((eigenvalue - 1e-9).abs() < 1e-15),
            other => panic!("expected out-of-manifold, got {other:?}"),
        }
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let text = r#"{"dim": 2, "re": [[0.75, 0.1], [0.1, 0.25]], "im": [[0.0, -0.2], [0.2, 0.0]]}"#;
        let rho = DensityMatrix::from_json(text).unwrap();
        assert!((rho.matrix().get(0, 1).im + 0.2).abs() < 1e-16);
        let again = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert!(again.same_point(&rho));

        let bad = r#"{"dim": 2, "re": [[0.75, 0.1], [0.3, 0.25]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
        assert!(matches!(DensityMatrix::from_json(bad), Err(Error::NotHermitian(_))));
        let short = r#"{"dim": 3, "re": [[1.0]], "im": [[0.0]]}"#;
        assert!(DensityMatrix::from_json(short).is_err());
        assert!(matches!(DensityMatrix::from_json("{"), Err(Error::Format(_))));
    }

    #[test]
    fn entropy_of_qubit() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let want = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((rho.entropy() - want).abs() < 1e-15);
    }
}
