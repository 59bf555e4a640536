use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::manifold::DensityMatrix;
use crate::spectral::{divided_difference_table, ScalarFn};

/// Tolerance for the representation invariants of a tangent payload,
/// relative to `max(1, ‖payload‖)`.
pub const TANGENT_TOL: f64 = 1e-10;

/// Which embedding a tangent payload is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    /// Derivative of `log ρ`; a score with `Tr(ρ A) = 0`.
    Plus,
    /// Derivative of `ρ`; traceless.
    Minus,
}

/// A tangent vector at a density matrix.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: DensityMatrix,
    rep: Rep,
    payload: HermitianMatrix,
}

impl TangentVector {
    /// Validated constructor.
    pub fn new(base: DensityMatrix, rep: Rep, payload: HermitianMatrix) -> Result<Self> {
        if payload.dim() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: payload.dim(),
            });
        }
        let residual = match rep {
            Rep::Minus => payload.trace(),
            Rep::Plus => base.matrix().trace_product(&payload),
        }
        .abs();
        if residual > TANGENT_TOL * payload.frobenius_norm().max(1.0) {
            return Err(Error::NotTangent(residual));
        }
        Ok(Self { base, rep, payload })
    }

    pub fn minus(base: DensityMatrix, payload: HermitianMatrix) -> Result<Self> {
        Self::new(base, Rep::Minus, payload)
    }

    pub fn plus(base: DensityMatrix, payload: HermitianMatrix) -> Result<Self> {
        Self::new(base, Rep::Plus, payload)
    }

    /// Removes the component that breaks the invariant: the trace part for
    /// `Minus`, the `Tr(ρA)·1` shift for `Plus`.
    pub fn projected(base: DensityMatrix, rep: Rep, payload: HermitianMatrix) -> Self {
        let payload = match rep {
            Rep::Minus => {
                let n = payload.dim() as f64;
                payload.shift(-payload.trace() / n)
            }
            Rep::Plus => {
                let m = base.matrix().trace_product(&payload);
                payload.shift(-m)
            }
        };
        Self { base, rep, payload }
    }

    pub(crate) fn from_parts_unchecked(base: DensityMatrix, rep: Rep, payload: HermitianMatrix) -> Self {
        Self { base, rep, payload }
    }

    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn payload(&self) -> &HermitianMatrix {
        &self.payload
    }

    pub fn into_payload(self) -> HermitianMatrix {
        self.payload
    }

    /// Converts between the two representations.
    ///
    /// In the eigenbasis of the base point, minus → plus multiplies component
    /// `(a, b)` by `(log p_a − log p_b)/(p_a − p_b)` and plus → minus divides by it.
    pub fn to_rep(&self, target: Rep) -> TangentVector {
        if target == self.rep {
            return self.clone();
        }
        let spec = self.base.spectrum();
        let table = divided_difference_table(ScalarFn::Log, spec);
        let payload = match target {
            Rep::Plus => spec.schur_apply(&self.payload, |a, b| table[(a, b)]),
            Rep::Minus => spec.schur_apply(&self.payload, |a, b| 1.0 / table[(a, b)]),
        };
        Self {
            base: self.base.clone(),
            rep: target,
            payload,
        }
    }

    pub fn minus_payload(&self) -> HermitianMatrix {
        match self.rep {
            Rep::Minus => self.payload.clone(),
            Rep::Plus => self.to_rep(Rep::Minus).payload,
        }
    }

    pub fn plus_payload(&self) -> HermitianMatrix {
        match self.rep {
            Rep::Plus => self.payload.clone(),
            Rep::Minus => self.to_rep(Rep::Plus).payload,
        }
    }

    /// `self + c * other`, in `self`'s representation.
    pub fn axpy(&self, c: f64, other: &TangentVector) -> Result<TangentVector> {
        if !self.base.same_point(&other.base) {
            return Err(Error::BaseMismatch);
        }
        let rhs = other.to_rep(self.rep);
        Ok(Self {
            base: self.base.clone(),
            rep: self.rep,
            payload: self.payload.axpy(c, &rhs.payload),
        })
    }

    pub fn scale(&self, c: f64) -> TangentVector {
        Self {
            base: self.base.clone(),
            rep: self.rep,
            payload: self.payload.scale(c),
        }
    }

    /// Residual of the representation invariant.
    pub fn invariant_residual(&self) -> f64 {
        match self.rep {
            Rep::Minus => self.payload.trace().abs(),
            Rep::Plus => self.base.matrix().trace_product(&self.payload).abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::from_parts(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap()
    }

    #[test]
    fn maximally_mixed_multiplier_is_dim() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -0.5, -0.5]);
        let v = TangentVector::minus(rho, a.clone()).unwrap();
        let p = v.to_rep(Rep::Plus);
        assert!((p.payload() - &a.scale(3.0)).max_abs() < 1e-13);
    }

    #[test]
    fn qubit_multiplier_against_finite_difference() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let v = TangentVector::minus(rho.clone(), sigma_x()).unwrap();
        let p = v.to_rep(Rep::Plus);
        let expected = 3f64.ln() / 0.5;
        assert!((p.payload().get(0, 1).re - expected).abs() < 1e-13);
        assert!((expected - 2.197225).abs() < 1e-6);

        // oracle: d/dt log(ρ + tσx) at t = 0 by central differences
        let h = 1e-5;
        let log_at = |t: f64| rho.matrix().axpy(t, &sigma_x()).eigh().apply(f64::ln);
        let fd = (&log_at(h) - &log_at(-h)).scale(0.5 / h);
        assert!((&fd - p.payload()).max_abs() < 1e-8);
    }

    #[test]
    fn invariant_enforcement() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(TangentVector::minus(rho.clone(), HermitianMatrix::identity(2)).is_err());
        // 1 is not a score at any point
        assert!(TangentVector::plus(rho.clone(), HermitianMatrix::identity(2)).is_err());
        let p = TangentVector::projected(rho.clone(), Rep::Plus, HermitianMatrix::from_real_diagonal(&[1.0, 0.0]));
        assert!(p.invariant_residual() < 1e-15);
        let m = p.to_rep(Rep::Minus);
        assert!(m.invariant_residual() < 1e-14);
    }
}
