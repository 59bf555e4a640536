use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::manifold::{Basis, DensityMatrix, Rep, TangentVector};
use crate::spectral::{frechet_second, ScalarFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartKind {
    /// `ρ(θ) = exp(Σ θ^i X_i − Ψ̃(θ))`.
    Exponential,
    /// `ρ(η) = 1/N + Σ η_i X_i`.
    Mixture,
}

/// A coordinate tuple together with the state it maps to.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    coords: Vec<f64>,
    state: DensityMatrix,
}

impl ChartPoint {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

/// A global coordinate system on the manifold built on an orthonormal basis.
///
/// Second derivatives are analytic (chained divided differences); the
/// finite-difference helpers in [`crate::fd`] exist to cross-check them.
pub trait Chart: Send + Sync {
    fn kind(&self) -> ChartKind;

    fn basis(&self) -> &Basis;

    fn state(&self, coords: &[f64]) -> Result<DensityMatrix>;

    fn coords(&self, rho: &DensityMatrix) -> Vec<f64>;

    /// `∂/∂x^i` at `at`, in the chart's natural representation.
    fn coordinate_vector(&self, at: &ChartPoint, i: usize) -> TangentVector;

    /// `∂²(log ρ)/∂x^i∂x^j`.
    fn log_second_derivative(&self, at: &ChartPoint, i: usize, j: usize) -> HermitianMatrix;

    /// `∂²ρ/∂x^i∂x^j`.
    fn state_second_derivative(&self, at: &ChartPoint, i: usize, j: usize) -> HermitianMatrix;

    /// Number of coordinates, `N² − 1`.
    fn len(&self) -> usize {
        self.basis().len()
    }

    fn point(&self, coords: &[f64]) -> Result<ChartPoint> {
        if coords.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coords.len(),
            });
        }
        Ok(ChartPoint {
            coords: coords.to_vec(),
            state: self.state(coords)?,
        })
    }

    fn point_at_state(&self, rho: DensityMatrix) -> ChartPoint {
        ChartPoint {
            coords: self.coords(&rho),
            state: rho,
        }
    }

    /// All coordinate vectors at `at`, converted to the minus representation.
    fn coordinate_vectors_minus(&self, at: &ChartPoint) -> Vec<TangentVector> {
        (0..self.len())
            .map(|i| self.coordinate_vector(at, i).to_rep(Rep::Minus))
            .collect()
    }
}

/// Exponential (`+1`-affine) chart.
#[derive(Clone, Debug)]
pub struct ExpChart {
    basis: Basis,
}

/// Evaluation of `exp(Σ θ^i X_i)` with the largest eigenvalue shifted out.
struct ShiftedExp {
    state: HermitianMatrix,
    log_partition: f64,
}

impl ExpChart {
    pub fn new(basis: Basis) -> Self {
        Self { basis }
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        Ok(Self::new(Basis::gell_mann(dim)?))
    }

    fn shifted_exp(&self, theta: &[f64]) -> Result<ShiftedExp> {
        if theta.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("exponential coordinates must be finite".into()));
        }
        let spec = self.basis.combine(theta).eigh();
        let top = spec.max();
        let z: f64 = spec.values.iter().map(|&l| (l - top).exp()).sum();
        Ok(ShiftedExp {
            state: spec.apply(|l| (l - top).exp() / z),
            log_partition: top + z.ln(),
        })
    }

    /// Free energy `Ψ̃(θ) = log Tr exp(Σ θ^i X_i)`.
    pub fn psi(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.shifted_exp(theta)?.log_partition)
    }

    /// Plus-representation of `∂/∂θ^i`: `X_i − (∂Ψ̃/∂θ^i)·1`.
    pub fn coord_basis_vector(&self, theta: &[f64], i: usize) -> Result<TangentVector> {
        let at = self.point(theta)?;
        Ok(self.coordinate_vector(&at, i))
    }

    /// Analytic BKM Gram matrix entry `∂²Ψ̃/∂θ^i∂θ^j = Tr(∂_i ρ X_j)`.
    fn free_energy_hessian(&self, at: &ChartPoint, i: usize, j: usize) -> f64 {
        let di_rho = self.coordinate_vector(at, i).minus_payload();
        di_rho.trace_product(self.basis.element(j))
    }

    fn exponent_derivative(&self, at: &ChartPoint, i: usize) -> HermitianMatrix {
        let x = self.basis.element(i);
        x.shift(-at.state().matrix().trace_product(x))
    }
}

impl Chart for ExpChart {
    fn kind(&self) -> ChartKind {
        ChartKind::Exponential
    }

    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn state(&self, theta: &[f64]) -> Result<DensityMatrix> {
        DensityMatrix::normalized(self.shifted_exp(theta)?.state)
    }

    fn coords(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.basis.project(&rho.log())
    }

    fn coordinate_vector(&self, at: &ChartPoint, i: usize) -> TangentVector {
        TangentVector::from_parts_unchecked(at.state().clone(), Rep::Plus, self.exponent_derivative(at, i))
    }

    fn log_second_derivative(&self, at: &ChartPoint, i: usize, j: usize) -> HermitianMatrix {
        // log ρ = Σ θ X − Ψ̃ is affine up to the scalar Ψ̃
        let n = self.basis.dim();
        HermitianMatrix::identity(n).scale(-self.free_energy_hessian(at, i, j))
    }

    fn state_second_derivative(&self, at: &ChartPoint, i: usize, j: usize) -> HermitianMatrix {
        let rho = at.state();
        let log_spec = rho.spectrum().map_values(f64::ln);
        let ki = self.exponent_derivative(at, i);
        let kj = self.exponent_derivative(at, j);
        let second = frechet_second(ScalarFn::Exp, &log_spec, &ki, &kj);
        second.axpy(-self.free_energy_hessian(at, i, j), rho.matrix())
    }
}

/// Mixture (`−1`-affine) chart, `η_i = Tr(ρ X_i)`.
#[derive(Clone, Debug)]
pub struct MixtureChart {
    basis: Basis,
}

impl MixtureChart {
    pub fn new(basis: Basis) -> Self {
        Self { basis }
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        Ok(Self::new(Basis::gell_mann(dim)?))
    }
}

impl Chart for MixtureChart {
    fn kind(&self) -> ChartKind {
        ChartKind::Mixture
    }

    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn state(&self, eta: &[f64]) -> Result<DensityMatrix> {
        if eta.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                got: eta.len(),
            });
        }
        let n = self.basis.dim();
        let m = self.basis.combine(eta).shift(1.0 / n as f64);
        DensityMatrix::new(m)
    }

    fn coords(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.basis.project(rho.matrix())
    }

    fn coordinate_vector(&self, at: &ChartPoint, i: usize) -> TangentVector {
        TangentVector::from_parts_unchecked(at.state().clone(), Rep::Minus, self.basis.element(i).clone())
    }

    fn log_second_derivative(&self, at: &ChartPoint, i: usize, j: usize) -> HermitianMatrix {
        frechet_second(
            ScalarFn::Log,
            at.state().spectrum(),
            self.basis.element(i),
            self.basis.element(j),
        )
    }

    fn state_second_derivative(&self, _at: &ChartPoint, _i: usize, _j: usize) -> HermitianMatrix {
        HermitianMatrix::zeros(self.basis.dim())
    }
}
